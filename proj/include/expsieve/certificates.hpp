#pragma once
// Self-contained JSON certificates for sieve runs, modulus chains, two-term
// linear-form bounds, and threshold computations, plus an independent
// verifier that replays the computation and deep-compares the claimed result.

#include <json.hpp>

#include <string>

#include "expsieve/baker.hpp"
#include "expsieve/constraints.hpp"
#include "expsieve/equation.hpp"
#include "expsieve/sieve.hpp"

namespace expsieve {

// Canonical JSON form of a sieve outcome; ordered keys, deterministic bytes.
nlohmann::ordered_json outcome_to_json(const SieveOutcome& outcome);

nlohmann::ordered_json make_sieve_certificate(const ExpEquation& eq,
                                              const FactoredModulus& modulus,
                                              const ConstraintSet& constraints,
                                              const SieveOutcome& outcome);

nlohmann::ordered_json make_chain_certificate(
    const ExpEquation& eq, const std::vector<FactoredModulus>& moduli,
    const ConstraintSet& constraints, const ChainResult& result);

// flavor is "padic" or "rational".
nlohmann::ordered_json make_bound_certificate(const std::string& flavor,
                                              const BoundReport& report);

nlohmann::ordered_json make_threshold_certificate(int e, u64 s);

struct VerifyResult {
    bool valid = false;
    std::string reason;  // empty when valid
};

// Re-derives the certified computation from the certificate's inputs and
// compares against its recorded result. Returns invalid (with a reason)
// rather than throwing for malformed or tampered certificates.
VerifyResult verify_certificate(const nlohmann::ordered_json& cert);

}  // namespace expsieve
