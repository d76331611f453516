#ifndef NLDISP_ERRORS_HPP
#define NLDISP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nldisp {

// Base class for every error the library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- expr ----
struct SyntaxError : Error {
    std::size_t offset;
    SyntaxError(const std::string& msg, std::size_t at)
        : Error(msg + " (at byte " + std::to_string(at) + ")"), offset(at) {}
};
struct UnknownIdentifier : Error {
    std::size_t offset;
    UnknownIdentifier(const std::string& name, std::size_t at)
        : Error("unknown function or constant '" + name + "' (at byte " + std::to_string(at) + ")"),
          offset(at) {}
};
struct UnboundVariable : Error {
    explicit UnboundVariable(const std::string& name)
        : Error("unbound variable '" + name + "'") {}
};
struct NonFiniteResult : Error {
    explicit NonFiniteResult(const std::string& subexpr)
        : Error("non-finite value from sub-expression " + subexpr) {}
};

// ---- habitat / config ----
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};
struct HypothesisHB0Violated : Error {
    explicit HypothesisHB0Violated(const std::string& msg)
        : Error("hypothesis HB0 violated: " + msg) {}
};
struct HB1Violated : Error {
    explicit HB1Violated(const std::string& msg) : Error("hypothesis HB1 violated: " + msg) {}
};

// ---- discretize ----
struct GridTooCoarse : Error {
    explicit GridTooCoarse(const std::string& msg) : Error("grid too coarse: " + msg) {}
};
struct NonFiniteWeight : Error {
    explicit NonFiniteWeight(const std::string& msg) : Error("non-finite kernel weight: " + msg) {}
};

// ---- evolve ----
struct NonFiniteState : Error {
    explicit NonFiniteState(const std::string& msg) : Error("non-finite state: " + msg) {}
};
struct InvariantRegionExit : Error {
    explicit InvariantRegionExit(const std::string& msg)
        : Error("state left the invariant region: " + msg) {}
};

// ---- spectral ----
struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error("no convergence: " + msg) {}
};
struct ExtinctionDetected : Error {
    explicit ExtinctionDetected(const std::string& msg) : Error("extinction detected: " + msg) {}
};
struct PreconditionLambdaNonnegative : Error {
    explicit PreconditionLambdaNonnegative(double lambda)
        : Error("principal spectrum point is nonnegative (" + std::to_string(lambda) +
                "); nonhomogeneous periodic solution requires lambda_0 < 0") {}
};

// ---- speeds ----
struct NoInteriorMinimum : Error {
    explicit NoInteriorMinimum(const std::string& msg) : Error("no interior minimum: " + msg) {}
};
struct NotFoundBelowCap : Error {
    explicit NotFoundBelowCap(const std::string& msg) : Error(msg) {}
};

// ---- fronts ----
struct DomainTooSmall : Error {
    explicit DomainTooSmall(const std::string& msg) : Error("domain too small: " + msg) {}
};
struct FrontHitBoundary : Error {
    explicit FrontHitBoundary(const std::string& msg)
        : Error("front reached the domain boundary: " + msg + " (increase L)") {}
};
struct LevelNotBracketed : Error {
    explicit LevelNotBracketed(const std::string& msg) : Error("level not bracketed: " + msg) {}
};
struct PoorFit : Error {
    explicit PoorFit(const std::string& msg) : Error("poor fit: " + msg) {}
};

// ---- determinacy ----
struct Lemma41Fails : Error {
    explicit Lemma41Fails(double lambda2)
        : Error("eigen-witness precondition fails: shifted principal spectrum point lambda2 = " +
                std::to_string(lambda2) + " >= 0") {}
};

// ---- cli ----
struct UsageError : Error {
    explicit UsageError(const std::string& msg) : Error("usage error: " + msg) {}
};

}  // namespace nldisp

#endif
