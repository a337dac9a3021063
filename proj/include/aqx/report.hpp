#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "aqx/envelope.hpp"
#include "aqx/homogenize.hpp"
#include "aqx/projection.hpp"
#include "aqx/twoscale.hpp"

namespace aqx {

using Json = nlohmann::ordered_json;

/// {"tool", "version", "command", "timestamp"}; the timestamp lives only here
/// so report bodies are comparable byte for byte.
Json report_header(const std::string& command);

/// {"header": header, "body": body} pretty-printed with a trailing newline.
std::string render_report(const Json& header, const Json& body);
void write_report(const std::string& path, const Json& header, const Json& body);
void write_text(const std::string& path, const std::string& text);

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

/// Output location: AQX_OUTPUT_DIR when set, else `dir`; absolute paths are
/// kept as given. Creates the directory when missing.
std::string resolve_output(const std::string& path, const std::string& dir);

Json to_json(const EnvelopeOptions& o, int N);
Json to_json(const EnvelopeResult& r);
Json to_json(const ProjectionReport& r);
Json to_json(const FieldClassReport& r);
Json to_json(const CellTrace& t);
Json to_json(const RelaxationReport& r);

}  // namespace aqx
