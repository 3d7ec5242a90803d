#include "slads/model.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "slads/error.hpp"
#include "slads/pgm.hpp"

namespace slads {

std::string to_string(RegressorKind kind) {
    switch (kind) {
        case RegressorKind::lsq: return "lsq";
        case RegressorKind::svr: return "svr";
        case RegressorKind::nn: return "nn";
    }
    return "unknown";
}

RegressorKind regressor_from_string(const std::string& name) {
    if (name == "lsq") return RegressorKind::lsq;
    if (name == "svr") return RegressorKind::svr;
    if (name == "nn") return RegressorKind::nn;
    throw ContractError("unknown regressor '" + name + "' (valid choices: lsq, svr, nn)");
}

void ErdModel::validate() const {
    const auto expected = static_cast<Eigen::Index>(kFeatureCount);
    switch (kind) {
        case RegressorKind::lsq: {
            const auto* m = std::get_if<LinearModel>(&payload);
            if (!m) throw ContractError("model kind lsq carries a different payload");
            if (m->theta.size() != expected) throw ContractError("linear model has wrong coefficient count");
            if (!m->theta.allFinite()) throw ContractError("linear model has non-finite coefficients");
            break;
        }
        case RegressorKind::svr: {
            const auto* m = std::get_if<SvrModel>(&payload);
            if (!m) throw ContractError("model kind svr carries a different payload");
            if (m->support_vectors.rows() < 1 || m->support_vectors.cols() != expected ||
                m->dual_coeffs.size() != m->support_vectors.rows())
                throw ContractError("support vector model has inconsistent shapes");
            if (!(m->gamma > 0.0)) throw ContractError("support vector model gamma must be positive");
            break;
        }
        case RegressorKind::nn: {
            const auto* m = std::get_if<MlpModel>(&payload);
            if (!m) throw ContractError("model kind nn carries a different payload");
            if (m->weights.empty() || m->weights.size() != m->biases.size())
                throw ContractError("network has no layers or mismatched bias count");
            Eigen::Index fan_in = expected;
            for (std::size_t l = 0; l < m->weights.size(); ++l) {
                if (m->weights[l].cols() != fan_in || m->biases[l].size() != m->weights[l].rows())
                    throw ContractError("network layer " + std::to_string(l) + " has inconsistent shape");
                fan_in = m->weights[l].rows();
            }
            if (fan_in != 1) throw ContractError("network must have a single output");
            break;
        }
        default: throw ContractError("unknown model kind");
    }
}

double predict(const ErdModel& model, std::span<const double> raw) {
    if (raw.size() != static_cast<std::size_t>(kFeatureCount))
        throw DimensionError("model expects " + std::to_string(kFeatureCount) + " features, got " +
                             std::to_string(raw.size()));
    FeatureArray v;
    std::copy(raw.begin(), raw.end(), v.begin());
    double out = 0.0;
    predict_batch(model, std::span<const FeatureArray>(&v, 1), std::span<double>(&out, 1));
    return out;
}

double predict(const ErdModel& model, const FeatureVector& v) { return predict(model, std::span<const double>(v.values)); }

void predict_batch(const ErdModel& model, std::span<const FeatureArray> raw, std::span<double> out) {
    if (out.size() < raw.size()) throw DimensionError("predict_batch: output buffer too small");
    if (const auto* lin = std::get_if<LinearModel>(&model.payload)) {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const FeatureArray z = standardize(raw[i], model.stats);
            out[i] = predict_linear(*lin, z);
        }
    } else if (const auto* svr = std::get_if<SvrModel>(&model.payload)) {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const FeatureArray z = standardize(raw[i], model.stats);
            out[i] = predict_svr(*svr, z);
        }
    } else {
        const auto& mlp = std::get<MlpModel>(model.payload);
        std::vector<double> z(raw.size() * kFeatureCount);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const FeatureArray s = standardize(raw[i], model.stats);
            std::copy(s.begin(), s.end(), z.begin() + static_cast<std::ptrdiff_t>(i * kFeatureCount));
        }
        mlp_forward(mlp, z, raw.size(), out);
    }
}

std::vector<double> predict_batch(const ErdModel& model, std::span<const FeatureArray> raw) {
    std::vector<double> out(raw.size());
    predict_batch(model, raw, out);
    return out;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class Writer {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        out.insert(out.end(), p, p + n);
    }
    template <typename T>
    void little(T value) {
        std::uint8_t buf[sizeof(T)];
        std::memcpy(buf, &value, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
        bytes(buf, sizeof(T));
    }
    std::vector<std::uint8_t> out;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::span<const std::uint8_t> take(std::size_t n) {
        if (pos_ + n > data_.size())
            throw ModelFileError(ModelFileError::Kind::malformed,
                                 "model file truncated at byte " + std::to_string(pos_));
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    template <typename T>
    T little() {
        auto s = take(sizeof(T));
        std::uint8_t buf[sizeof(T)];
        std::copy(s.begin(), s.end(), buf);
        if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
        T value;
        std::memcpy(&value, buf, sizeof(T));
        return value;
    }
    std::size_t pos() const noexcept { return pos_; }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

using Json = nlohmann::json;

Json stats_to_json(const FeatureStats& s) {
    return {{"means", std::vector<double>(s.means.begin(), s.means.end())},
            {"stddevs", std::vector<double>(s.stddevs.begin(), s.stddevs.end())}};
}

FeatureStats stats_from_json(const Json& j) {
    FeatureStats s;
    const auto means = j.at("means").get<std::vector<double>>();
    const auto sds = j.at("stddevs").get<std::vector<double>>();
    if (means.size() != static_cast<std::size_t>(kFeatureCount) || sds.size() != means.size())
        throw ModelFileError(ModelFileError::Kind::malformed, "feature statistics have the wrong length");
    std::copy(means.begin(), means.end(), s.means.begin());
    std::copy(sds.begin(), sds.end(), s.stddevs.begin());
    return s;
}

void append_row_major(std::vector<double>& values, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
}

class ValueCursor {
public:
    explicit ValueCursor(const std::vector<double>& v) : v_(v) {}
    double next() {
        if (pos_ >= v_.size())
            throw ModelFileError(ModelFileError::Kind::malformed, "model payload shorter than its header declares");
        return v_[pos_++];
    }
    Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = next();
        return m;
    }
    bool exhausted() const { return pos_ == v_.size(); }

private:
    const std::vector<double>& v_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_model(const ErdModel& model) {
    model.validate();
    Json header;
    header["kind"] = to_string(model.kind);
    header["feature_count"] = kFeatureCount;
    header["stats"] = stats_to_json(model.stats);
    header["idw"] = {{"neighbors", model.idw.neighbors}, {"power", model.idw.power}, {"window", model.idw.window}};
    header["metadata"] = model.metadata;

    std::vector<double> values;
    if (const auto* lin = std::get_if<LinearModel>(&model.payload)) {
        header["payload"] = {{"theta", lin->theta.size()}};
        for (Eigen::Index i = 0; i < lin->theta.size(); ++i) values.push_back(lin->theta[i]);
    } else if (const auto* svr = std::get_if<SvrModel>(&model.payload)) {
        header["payload"] = {{"support_vectors", svr->support_vectors.rows()}, {"C", svr->C}, {"epsilon", svr->epsilon}};
        append_row_major(values, svr->support_vectors);
        for (Eigen::Index i = 0; i < svr->dual_coeffs.size(); ++i) values.push_back(svr->dual_coeffs[i]);
        values.push_back(svr->bias);
        values.push_back(svr->gamma);
    } else {
        const auto& mlp = std::get<MlpModel>(model.payload);
        Json layers = Json::array();
        for (const auto& W : mlp.weights) layers.push_back({W.rows(), W.cols()});
        header["payload"] = {{"layers", layers}, {"activation", to_string(mlp.activation)}};
        for (std::size_t l = 0; l < mlp.layer_count(); ++l) {
            append_row_major(values, mlp.weights[l]);
            for (Eigen::Index i = 0; i < mlp.biases[l].size(); ++i) values.push_back(mlp.biases[l][i]);
        }
    }

    const std::string header_text = header.dump();
    Writer w;
    w.bytes("SLNM", 4);
    w.little<std::uint32_t>(model.schema_version);
    w.little<std::uint8_t>(static_cast<std::uint8_t>(model.kind));
    w.little<std::uint32_t>(static_cast<std::uint32_t>(header_text.size()));
    w.bytes(header_text.data(), header_text.size());
    w.little<std::uint64_t>(values.size());
    for (double v : values) w.little<std::uint64_t>(std::bit_cast<std::uint64_t>(v));
    w.little<std::uint32_t>(crc32(w.out));
    return std::move(w.out);
}

ErdModel deserialize_model(std::span<const std::uint8_t> bytes) {
    using K = ModelFileError::Kind;
    if (bytes.size() < 4 + 4 + 1 + 4 + 8 + 4 || std::memcmp(bytes.data(), "SLNM", 4) != 0)
        throw ModelFileError(K::bad_magic, "not a model file (missing SLNM magic)");
    const auto body = bytes.first(bytes.size() - 4);
    Reader tail(bytes.last(4));
    const auto stored_crc = tail.little<std::uint32_t>();
    if (stored_crc != crc32(body)) throw ModelFileError(K::checksum, "model file checksum mismatch");

    Reader r(body);
    r.take(4);
    ErdModel model;
    model.schema_version = r.little<std::uint32_t>();
    if (model.schema_version != kModelSchemaVersion)
        throw ModelFileError(K::version_mismatch, "model file schema version " + std::to_string(model.schema_version) +
                                                      " is not supported (this build reads version " +
                                                      std::to_string(kModelSchemaVersion) + ")");
    const auto kind_byte = r.little<std::uint8_t>();
    if (kind_byte < 1 || kind_byte > 3)
        throw ModelFileError(K::kind_mismatch, "unknown model kind byte " + std::to_string(kind_byte));
    model.kind = static_cast<RegressorKind>(kind_byte);
    const auto header_len = r.little<std::uint32_t>();
    const auto header_bytes = r.take(header_len);
    Json header;
    try {
        header = Json::parse(header_bytes.begin(), header_bytes.end());
    } catch (const Json::exception& e) {
        throw ModelFileError(K::malformed, std::string("model header is not valid JSON: ") + e.what());
    }
    const auto count = r.little<std::uint64_t>();
    if (count > (body.size() - r.pos()) / 8)
        throw ModelFileError(K::malformed, "model payload shorter than its declared length");
    std::vector<double> values(count);
    for (auto& v : values) v = std::bit_cast<double>(r.little<std::uint64_t>());
    if (r.pos() != body.size()) throw ModelFileError(K::malformed, "trailing bytes after model payload");

    try {
        if (header.at("kind").get<std::string>() != to_string(model.kind))
            throw ModelFileError(K::kind_mismatch, "header kind '" + header.at("kind").get<std::string>() +
                                                       "' does not match kind byte (" + to_string(model.kind) + ")");
        if (header.at("feature_count").get<int>() != kFeatureCount)
            throw ModelFileError(K::malformed, "model was trained on a different feature schema");
        model.stats = stats_from_json(header.at("stats"));
        const Json& idw = header.at("idw");
        model.idw = {idw.at("neighbors").get<int>(), idw.at("power").get<double>(), idw.at("window").get<int>()};
        model.metadata = header.value("metadata", Json::object());

        const Json& p = header.at("payload");
        ValueCursor cur(values);
        const auto t = static_cast<Eigen::Index>(kFeatureCount);
        switch (model.kind) {
            case RegressorKind::lsq: {
                if (!p.contains("theta"))
                    throw ModelFileError(K::kind_mismatch, "lsq model header lacks a theta payload");
                LinearModel m;
                m.theta = cur.matrix(p.at("theta").get<Eigen::Index>(), 1);
                model.payload = std::move(m);
                break;
            }
            case RegressorKind::svr: {
                if (!p.contains("support_vectors"))
                    throw ModelFileError(K::kind_mismatch, "svr model header lacks support vectors");
                SvrModel m;
                const auto n = p.at("support_vectors").get<Eigen::Index>();
                m.support_vectors = cur.matrix(n, t);
                m.dual_coeffs = cur.matrix(n, 1);
                m.bias = cur.next();
                m.gamma = cur.next();
                m.C = p.at("C").get<double>();
                m.epsilon = p.at("epsilon").get<double>();
                model.payload = std::move(m);
                break;
            }
            case RegressorKind::nn: {
                if (!p.contains("layers"))
                    throw ModelFileError(K::kind_mismatch, "nn model header lacks layer shapes");
                MlpModel m;
                m.activation = activation_from_string(p.at("activation").get<std::string>());
                for (const auto& shape : p.at("layers")) {
                    const auto rows = shape.at(0).get<Eigen::Index>();
                    const auto cols = shape.at(1).get<Eigen::Index>();
                    m.weights.push_back(cur.matrix(rows, cols));
                    m.biases.push_back(cur.matrix(rows, 1));
                }
                model.payload = std::move(m);
                break;
            }
        }
        if (!cur.exhausted()) throw ModelFileError(K::malformed, "model payload longer than its header declares");
    } catch (const Json::exception& e) {
        throw ModelFileError(K::malformed, std::string("model header is incomplete: ") + e.what());
    }
    try {
        model.validate();
    } catch (const ContractError& e) {
        throw ModelFileError(K::malformed, e.what());
    }
    return model;
}

void save_model(const ErdModel& model, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_model(model));
}

ErdModel load_model(const std::filesystem::path& path) { return deserialize_model(read_file_bytes(path)); }

}  // namespace slads
