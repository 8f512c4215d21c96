#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vofabrik {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DegenerateSegment : public Error {
public:
  DegenerateSegment() : Error("degenerate segment (length below 1e-12 m)") {}
};

class DegenerateDirection : public Error {
public:
  DegenerateDirection() : Error("degenerate direction: points coincide") {}
};

class AngleOutOfLimits : public Error {
public:
  explicit AngleOutOfLimits(std::size_t joint)
      : Error("joint " + std::to_string(joint) + " angle outside its limits"), joint_(joint) {}
  std::size_t joint() const noexcept { return joint_; }

private:
  std::size_t joint_;
};

class InconsistentPositions : public Error {
public:
  explicit InconsistentPositions(const std::string& what) : Error(what) {}
};

class GimbalSingularity : public Error {
public:
  explicit GimbalSingularity(std::size_t link)
      : Error("gimbal singularity at link " + std::to_string(link)), link_(link) {}
  std::size_t link() const noexcept { return link_; }

private:
  std::size_t link_;
};

class InvalidModel : public Error {
public:
  explicit InvalidModel(const std::string& what) : Error(what) {}
};

class AlreadyInCollision : public Error {
public:
  AlreadyInCollision() : Error("agent already overlaps the obstacle") {}
};

class NoAdmissibleVelocity : public Error {
public:
  NoAdmissibleVelocity() : Error("every sampled direction lies inside a collision cone") {}
};

class SafeSetEmpty : public Error {
public:
  explicit SafeSetEmpty(std::size_t link = 0)
      : Error("no safe joint angle for link " + std::to_string(link)), link_(link) {}
  std::size_t link() const noexcept { return link_; }

private:
  std::size_t link_;
};

class InitialStateInCollision : public Error {
public:
  explicit InitialStateInCollision(const std::string& what) : Error(what) {}
};

}  // namespace vofabrik
