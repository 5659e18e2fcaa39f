#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace nearnormal {

/// Base class for failures that reflect the mathematical content of the input
/// (as opposed to malformed parameters, which raise std::invalid_argument).
/// The command line tool maps these to exit code 3.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The input's self-commutator is too large for an exact spectral decomposition.
class NotNormal : public DomainError {
public:
    explicit NotNormal(double defect);
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

/// An eigenvalue lies outside every region of the supplied cover.
class UncoveredSpectrum : public DomainError {
public:
    explicit UncoveredSpectrum(std::complex<double> eigenvalue);
    std::complex<double> eigenvalue() const noexcept { return eigenvalue_; }

private:
    std::complex<double> eigenvalue_;
};

/// Spectrum inside the disc does not lie on the chord passed to remove_arc.
class SpectrumOffContour : public DomainError {
public:
    explicit SpectrumOffContour(std::complex<double> eigenvalue);
    std::complex<double> eigenvalue() const noexcept { return eigenvalue_; }

private:
    std::complex<double> eigenvalue_;
};

/// Truncation to an empty spectral subspace.
class EmptyTruncation : public DomainError {
public:
    explicit EmptyTruncation(double lambda);
};

std::string format_complex(std::complex<double> z);

} // namespace nearnormal
