#ifndef HETREE_ERROR_H_
#define HETREE_ERROR_H_

#include <stdexcept>
#include <string>

namespace hetree {

enum class ErrorCode {
  kEmptyDataset,
  kMixedKinds,
  kParameter,
  kPrecondition,
  kDegenerateRange,
  kNoCandidate,
  kNotFound,
  kEmptyRange,
  kStaleOperation,
  kInvalidOperation,
  kTopOfTree,
  kUnsupported,
  kNoOp,
  kInvariant,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hetree

#endif  // HETREE_ERROR_H_
