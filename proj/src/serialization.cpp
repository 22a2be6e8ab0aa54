#include "qnm/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qnm {

nlohmann::json matrix_to_json(const Matrix& m, const std::optional<Split>& split) {
    nlohmann::json j;
    j["dim"] = m.rows();
    if (split)
        j["split"] = {split->dA, split->dB};
    else
        j["split"] = nullptr;
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (long r = 0; r < m.rows(); ++r) {
        nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
        for (long c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ri.push_back(m(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

Matrix matrix_from_json(const nlohmann::json& j, std::optional<Split>* split_out) {
    if (!j.contains("dim") || !j.contains("re") || !j.contains("im"))
        throw std::invalid_argument("matrix json: missing dim/re/im");
    const long n = j.at("dim").get<long>();
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<long>(re.size()) != n || static_cast<long>(im.size()) != n)
        throw std::invalid_argument("matrix json: row count != dim");
    Matrix m(n, n);
    for (long r = 0; r < n; ++r) {
        if (static_cast<long>(re[r].size()) != n || static_cast<long>(im[r].size()) != n)
            throw std::invalid_argument("matrix json: column count != dim");
        for (long c = 0; c < n; ++c)
            m(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
    }
    if (split_out) {
        *split_out = std::nullopt;
        if (j.contains("split") && !j.at("split").is_null()) {
            const auto& s = j.at("split");
            *split_out = Split{s.at(0).get<int>(), s.at(1).get<int>()};
        }
    }
    return m;
}

nlohmann::json to_json(const HermitianOperator& h) { return matrix_to_json(h.matrix(), h.split()); }

HermitianOperator hermitian_from_json(const nlohmann::json& j) {
    std::optional<Split> split;
    Matrix m = matrix_from_json(j, &split);
    return HermitianOperator(std::move(m), split);
}

DensityOperator density_from_json(const nlohmann::json& j) {
    std::optional<Split> split;
    Matrix m = matrix_from_json(j, &split);
    return DensityOperator(std::move(m), split);
}

nlohmann::json to_json(const QuantumChannel& c) {
    nlohmann::json j;
    j["dim"] = c.dim();
    nlohmann::json ks = nlohmann::json::array();
    for (const auto& k : c.kraus()) ks.push_back(matrix_to_json(k));
    j["kraus"] = ks;
    return j;
}

QuantumChannel channel_from_json(const nlohmann::json& j) {
    if (!j.contains("dim")) throw std::invalid_argument("channel json: missing dim");
    const int d = j.at("dim").get<int>();
    if (j.contains("kraus")) {
        std::vector<Matrix> kraus;
        for (const auto& kj : j.at("kraus")) {
            Matrix k = matrix_from_json(kj);
            if (k.rows() != d) throw std::invalid_argument("channel json: kraus dim mismatch");
            kraus.push_back(std::move(k));
        }
        return QuantumChannel::from_kraus(std::move(kraus));
    }
    if (j.contains("choi")) {
        std::optional<Split> split;
        Matrix m = matrix_from_json(j.at("choi"), &split);
        if (!split) split = Split{d, d};
        return QuantumChannel::from_choi(DensityOperator(std::move(m), split));
    }
    throw std::invalid_argument("channel json: need kraus or choi");
}

nlohmann::json to_json(const ChannelTrajectory& t) {
    nlohmann::json j;
    j["times"] = t.times;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : t.channels) cs.push_back(to_json(c));
    j["channels"] = cs;
    return j;
}

ChannelTrajectory trajectory_from_json(const nlohmann::json& j) {
    if (!j.contains("times") || !j.contains("channels"))
        throw std::invalid_argument("trajectory json: missing times/channels");
    std::vector<double> times = j.at("times").get<std::vector<double>>();
    std::vector<QuantumChannel> channels;
    for (const auto& cj : j.at("channels")) channels.push_back(channel_from_json(cj));
    return ChannelTrajectory(std::move(times), std::move(channels));
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

}  // namespace qnm
