#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nakano {

/// Base of every error raised by the solver library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "Error"; }
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "ShapeMismatch"; }
};

class InvalidGrid : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "InvalidGrid"; }
};

/// A Hermitian field failed to factor at `point`; `min_eigenvalue` is the
/// smallest eigenvalue found there.
class NotPositive : public Error {
public:
    NotPositive(std::size_t point, double min_eigenvalue, const std::string& what = "matrix is not positive definite");
    std::size_t point() const noexcept { return point_; }
    double min_eigenvalue() const noexcept { return min_eig_; }
    const char* kind() const noexcept override { return "NotPositive"; }

private:
    std::size_t point_;
    double min_eig_;
};

/// Scenario data violates the Nakano positivity margin.
class NotNakanoPositive : public NotPositive {
public:
    using NotPositive::NotPositive;
    const char* kind() const noexcept override { return "NotNakanoPositive"; }
};

/// Iterate left the admissible cone; the caller must damp.
class OutsideCone : public NotPositive {
public:
    using NotPositive::NotPositive;
    const char* kind() const noexcept override { return "OutsideCone"; }
};

class NonPositiveMetric : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "NonPositiveMetric"; }
};

class NotUnitary : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "NotUnitary"; }
};

class UnresolvedMode : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "UnresolvedMode"; }
};

class ImaginaryLeak : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "ImaginaryLeak"; }
};

class NoConvergence : public Error {
public:
    NoConvergence(int iterations, double achieved);
    int iterations() const noexcept { return iterations_; }
    double achieved() const noexcept { return achieved_; }
    const char* kind() const noexcept override { return "NoConvergence"; }

private:
    int iterations_;
    double achieved_;
};

class NewtonStall : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "NewtonStall"; }
};

class SingularJacobian : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "SingularJacobian"; }
};

class RankMismatch : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "RankMismatch"; }
};

class SchemaError : public Error {
public:
    SchemaError(std::string key, const std::string& reason);
    const std::string& key() const noexcept { return key_; }
    const char* kind() const noexcept override { return "SchemaError"; }

private:
    std::string key_;
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "IoError"; }
};

}  // namespace nakano
