#pragma once

#include <stdexcept>
#include <string>

namespace pnp {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeshError : public Error { public: using Error::Error; };

/// A coefficient or field sample was NaN/inf or violated a positivity floor.
class AssemblyError : public Error { public: using Error::Error; };

class LinearSolverError : public Error { public: using Error::Error; };

class NewtonError : public Error { public: using Error::Error; };

/// An FeFunction or state was used with a mesh it does not live on.
class MeshMismatchError : public Error { public: using Error::Error; };

}  // namespace pnp
