#pragma once

#include <stdexcept>
#include <string>

namespace nrd {

// Failure taxonomy shared by the library and the CLI exit-code mapping.
// Precondition violations (wrong shapes, non-Hermitian input where Hermitian
// is required) use std::invalid_argument; the classes below cover outcomes
// that depend on the numerical content of valid inputs.

/// W(B) is not contained in W(A); `margin` is the worst support-function gap.
class NotIncluded : public std::runtime_error {
public:
    NotIncluded(const std::string& what, double margin)
        : std::runtime_error(what), margin_(margin) {}
    double margin() const noexcept { return margin_; }

private:
    double margin_;
};

/// A falls outside the covered matrix classes.
class UnsupportedCase : public std::runtime_error {
public:
    explicit UnsupportedCase(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical stage produced a residual beyond its contract.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& stage, const std::string& what, double residual)
        : std::runtime_error(stage + ": " + what), stage_(stage), residual_(residual) {}
    const std::string& stage() const noexcept { return stage_; }
    double residual() const noexcept { return residual_; }

private:
    std::string stage_;
    double residual_;
};

/// Spectral clamp of a nominal contraction exceeded the allowed overshoot.
class ContractionOvershoot : public NumericalFailure {
public:
    explicit ContractionOvershoot(double overshoot)
        : NumericalFailure("contraction", "eigenvalue overshoot beyond [-1,1]", overshoot) {}
};

/// Dykstra iteration hit its cap; `residual()` carries the final PSD gap.
/// Callers treat this as an infeasibility signal, never as a proof.
class MaxIterations : public NumericalFailure {
public:
    MaxIterations(const std::string& stage, double gap)
        : NumericalFailure(stage, "iteration cap reached", gap) {}
};

/// Geometry too degenerate to reduce (coincident eigenvalues, collapsed axes).
class DegenerateGeometry : public NumericalFailure {
public:
    explicit DegenerateGeometry(const std::string& what)
        : NumericalFailure("reduce", what, 0.0) {}
};

} // namespace nrd
