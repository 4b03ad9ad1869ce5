// cli.hpp — scenario configuration, dispatch, sweeps and table output
#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace entroprod::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// Schema violation; field is a dotted path such as "parameters.beta".
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& reason);
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Cells are JSON numbers, booleans or strings.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
};

struct Output {
    std::string quantity;
    std::filesystem::path path;  // relative to the output directory
    std::string content;
};

struct RunOptions {
    int jobs = 1;
    std::filesystem::path out_dir = ".";
};

// "kind.quantity" for every supported scenario.
std::vector<std::string> quantity_names();

// Validates the config and evaluates every requested quantity. Throws
// ValidationError on schema violations and propagates module exceptions.
std::vector<Output> evaluate(const nlohmann::json& config, int jobs = 1);

// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);
std::string format_double(double x);  // %.17g
std::string render_csv(const Table& t, const std::string& provenance);
std::string render_json(const Table& t, const nlohmann::json& provenance);

// Entry points with exit codes; messages go to err.
int run(const std::filesystem::path& config_path, const RunOptions& opt, std::ostream& out, std::ostream& err);
int verify(const std::string& suite, std::ostream& out, std::ostream& err);

}  // namespace entroprod::cli
