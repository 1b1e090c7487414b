#pragma once

#include <stdexcept>
#include <string>

namespace dg {

enum class errc {
  not_square,
  not_symmetric,
  no_convergence,
  bad_diagonal,
  disconnected,
  dimension_mismatch,
  bad_density,
  degenerate_sample,
  too_large,
  too_short,
  empty_corpus,
  empty_graph,
  empty_input,
  mixed_k,
  bad_label_range,
  not_psd,
  empty_training_set,
  bad_value,
  io_error,
};

const char* errc_name(errc c);

// Data errors are properties of the input (bad files, invariant violations);
// everything else is a numerical-process failure. The CLI maps the former to
// exit code 2 and the latter to 3.
bool is_data_error(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, std::string op, const std::string& message);
  errc code() const { return code_; }
  // Name of the operation that failed, e.g. "linalg.jacobi_eig".
  const std::string& op() const { return op_; }

 private:
  errc code_;
  std::string op_;
};

[[noreturn]] void fail(errc code, const std::string& op, const std::string& message);

inline void require(bool cond, errc code, const char* op, const std::string& message) {
  if (!cond) fail(code, op, message);
}

}  // namespace dg
