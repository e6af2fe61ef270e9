#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace arraymem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Green's tensor requested at coincident points.
class SingularPoint : public Error {
public:
    using Error::Error;
};

/// Two atoms closer than the minimum separation.
class SingularGeometry : public Error {
public:
    using Error::Error;
};

/// Quadrature, integrator or solver failed to reach its tolerance.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double achieved)
        : Error(what + " (achieved estimate " + format(achieved) + ")"), achieved_(achieved) {}
    explicit NumericalError(const std::string& what) : Error(what) {}

    double achieved() const noexcept { return achieved_; }

private:
    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        return buf;
    }

    double achieved_ = 0.0;
};

/// Eigenvectors could not be normalized under the bilinear form.
class DefectiveSpectrum : public Error {
public:
    DefectiveSpectrum(const std::string& what, std::vector<int> indices)
        : Error(what), indices_(std::move(indices)) {}

    const std::vector<int>& indices() const noexcept { return indices_; }

private:
    std::vector<int> indices_;
};

/// Pair of modes with a vanishing K-matrix denominator.
class SingularPair : public Error {
public:
    SingularPair(const std::string& what, int first, int second)
        : Error(what), first_(first), second_(second) {}

    int first() const noexcept { return first_; }
    int second() const noexcept { return second_; }

private:
    int first_;
    int second_;
};

class FitWindowError : public Error {
public:
    using Error::Error;
};

/// Configuration rejected; carries the offending key path.
class ConfigError : public Error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : Error(path + ": " + message), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace arraymem
