#pragma once

#include <stdexcept>
#include <string>

namespace kspin {

// Base of every error raised by the library; the CLI maps these to exit code 2.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class size_error : public error {
public:
    using error::error;
};

class context_mismatch : public error {
public:
    using error::error;
};

class grade_error : public error {
public:
    using error::error;
};

class domain_error : public error {
public:
    using error::error;
};

class band_error : public error {
public:
    using error::error;
};

class parameter_error : public error {
public:
    using error::error;
};

class precondition_error : public error {
public:
    using error::error;
};

class convergence_error : public error {
public:
    using error::error;
};

}  // namespace kspin
