#pragma once

#include <stdexcept>
#include <string>

namespace ginzburg {

// Invalid physical or numerical input (preconditions, bad config values).
class DomainError : public std::domain_error {
  public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Undamped resonance hit exactly: epsilon(omega) has a pole at |omega| = Omega
// when G^2 = 0.  Never regularized silently.
class ResonanceSingularityError : public DomainError {
  public:
    explicit ResonanceSingularityError(const std::string& what) : DomainError(what) {}
};

// Root bracketing / calibration target not reachable.
class CalibrationError : public std::runtime_error {
  public:
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

// A closed form evaluated outside the regime it was derived for.
class OutOfValidityError : public DomainError {
  public:
    explicit OutOfValidityError(const std::string& what) : DomainError(what) {}
};

// Requested scenario has no physical solution (e.g. no sub-luminal velocity
// satisfies the Doppler condition below the cutoff).
class InfeasibleError : public std::runtime_error {
  public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Mode propagates instead of decaying: k_z <= Omega has no e-folding length.
class NonEvanescentError : public DomainError {
  public:
    explicit NonEvanescentError(const std::string& what) : DomainError(what) {}
};

// Malformed input file; carries a 1-based line number when known.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what)
        , line_(line)
    {
    }
    long line() const { return line_; }

  private:
    long line_;
};

}  // namespace ginzburg
