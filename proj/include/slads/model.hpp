#pragma once

#include <cstdint>
#include <filesystem>
#include "json.hpp"
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slads/features.hpp"
#include "slads/linear.hpp"
#include "slads/mlp.hpp"
#include "slads/recon.hpp"
#include "slads/svr.hpp"

namespace slads {

enum class RegressorKind : std::uint8_t { lsq = 1, svr = 2, nn = 3 };

std::string to_string(RegressorKind kind);
/// Throws ContractError listing the valid choices.
RegressorKind regressor_from_string(const std::string& name);

inline constexpr std::uint32_t kModelSchemaVersion = 1;

/// A trained ERD regressor together with everything needed to apply it:
/// the feature standardization and the interpolation settings it was trained with.
struct ErdModel {
    RegressorKind kind = RegressorKind::lsq;
    std::variant<LinearModel, SvrModel, MlpModel> payload;
    FeatureStats stats;
    IdwParams idw;
    std::uint32_t schema_version = kModelSchemaVersion;
    nlohmann::json metadata = nlohmann::json::object();

    /// Throws ContractError if the payload does not match `kind` or shapes are off.
    void validate() const;
};

/// Estimated ERD for a raw (unstandardized) descriptor.
double predict(const ErdModel& model, const FeatureVector& v);
/// Throws DimensionError when v.size() != kFeatureCount.
double predict(const ErdModel& model, std::span<const double> raw);
void predict_batch(const ErdModel& model, std::span<const FeatureArray> raw, std::span<double> out);
std::vector<double> predict_batch(const ErdModel& model, std::span<const FeatureArray> raw);

/// Container: "SLNM" | u32 version | u8 kind | u32 header length | JSON header |
/// u64 value count | f64 values | u32 CRC-32 of everything before it.
/// All integers and reals little-endian.
std::vector<std::uint8_t> serialize_model(const ErdModel& model);
ErdModel deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const ErdModel& model, const std::filesystem::path& path);
ErdModel load_model(const std::filesystem::path& path);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace slads
