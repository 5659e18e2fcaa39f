#include "nearnormal/errors.hpp"

#include <sstream>

namespace nearnormal {

std::string format_complex(std::complex<double> z)
{
    std::ostringstream os;
    os.precision(17);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

namespace {

std::string with_value(const char* name, double v)
{
    std::ostringstream os;
    os.precision(17);
    os << name << "(defect=" << v << ")";
    return os.str();
}

} // namespace

NotNormal::NotNormal(double defect)
    : DomainError(with_value("NotNormal", defect)), defect_(defect)
{
}

UncoveredSpectrum::UncoveredSpectrum(std::complex<double> eigenvalue)
    : DomainError("UncoveredSpectrum(" + format_complex(eigenvalue) + ")"),
      eigenvalue_(eigenvalue)
{
}

SpectrumOffContour::SpectrumOffContour(std::complex<double> eigenvalue)
    : DomainError("SpectrumOffContour(" + format_complex(eigenvalue) + ")"),
      eigenvalue_(eigenvalue)
{
}

EmptyTruncation::EmptyTruncation(double lambda)
    : DomainError([lambda] {
          std::ostringstream os;
          os.precision(17);
          os << "EmptyTruncation(lambda=" << lambda << ")";
          return os.str();
      }())
{
}

} // namespace nearnormal
