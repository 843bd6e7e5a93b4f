#include "recon/error.hpp"

namespace recon {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::load: return "load_error";
    case Errc::integrity: return "integrity_error";
    case Errc::argument: return "argument_error";
    case Errc::not_in_database: return "not_in_database";
    case Errc::syntax: return "syntax_error";
    case Errc::semantic: return "semantic_error";
    case Errc::unparseable: return "unparseable";
    case Errc::clarification: return "clarification_needed";
    case Errc::backend: return "backend_error";
    case Errc::extraction: return "extraction_error";
    case Errc::oracle_unavailable: return "oracle_unavailable";
    case Errc::undefined_metric: return "undefined_metric";
    case Errc::phase: return "phase_violation";
    case Errc::not_found: return "not_found";
    case Errc::out_of_bounds: return "out_of_bounds";
    case Errc::classification: return "classification_error";
  }
  return "error";
}

std::string_view to_string(BackendErrc category) {
  switch (category) {
    case BackendErrc::timeout: return "timeout";
    case BackendErrc::transport: return "transport";
    case BackendErrc::http_status: return "http_status";
    case BackendErrc::malformed_body: return "malformed_body";
    case BackendErrc::extraction: return "extraction";
    case BackendErrc::not_configured: return "not_configured";
  }
  return "unknown";
}

}  // namespace recon
