#include "dg/error.hpp"

namespace dg {

const char* errc_name(errc c) {
  switch (c) {
    case errc::not_square: return "NotSquare";
    case errc::not_symmetric: return "NotSymmetric";
    case errc::no_convergence: return "NoConvergence";
    case errc::bad_diagonal: return "BadDiagonal";
    case errc::disconnected: return "Disconnected";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::bad_density: return "BadDensity";
    case errc::degenerate_sample: return "DegenerateSample";
    case errc::too_large: return "TooLarge";
    case errc::too_short: return "TooShort";
    case errc::empty_corpus: return "EmptyCorpus";
    case errc::empty_graph: return "EmptyGraph";
    case errc::empty_input: return "EmptyInput";
    case errc::mixed_k: return "MixedK";
    case errc::bad_label_range: return "BadLabelRange";
    case errc::not_psd: return "NotPsd";
    case errc::empty_training_set: return "EmptyTrainingSet";
    case errc::bad_value: return "BadValue";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

bool is_data_error(errc c) {
  switch (c) {
    case errc::no_convergence:
    case errc::degenerate_sample:
    case errc::not_psd:
      return false;
    default:
      return true;
  }
}

Error::Error(errc code, std::string op, const std::string& message)
    : std::runtime_error(op + ": " + errc_name(code) + ": " + message),
      code_(code),
      op_(std::move(op)) {}

void fail(errc code, const std::string& op, const std::string& message) {
  throw Error(code, op, message);
}

}  // namespace dg
