#include "tising/spin.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tising/rng.hpp"

namespace tising {

SpinConfig::SpinConfig(std::vector<int8_t> spins) : spins_(std::move(spins)) {
    for (int8_t s : spins_) {
        if (s != 1 && s != -1) throw std::invalid_argument("SpinConfig: entries must be +1 or -1");
    }
}

SpinConfig SpinConfig::all_plus(int n) {
    if (n <= 0) throw std::invalid_argument("SpinConfig: n must be positive");
    return SpinConfig(std::vector<int8_t>(static_cast<std::size_t>(n), int8_t{1}));
}

void SpinConfig::set(int i, int8_t s) {
    if (s != 1 && s != -1) throw std::invalid_argument("SpinConfig: entries must be +1 or -1");
    spins_[static_cast<std::size_t>(i)] = s;
}

long long SpinConfig::spin_sum() const {
    long long s = 0;
    for (int8_t v : spins_) s += v;
    return s;
}

double SpinConfig::mean() const {
    return static_cast<double>(spin_sum()) / static_cast<double>(spins_.size());
}

std::uint64_t SpinConfig::hash() const {
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    for (std::size_t i = 0; i < spins_.size(); ++i) {
        h = mix64(h, static_cast<std::uint64_t>(spins_[i] > 0 ? 2 * i + 1 : 2 * i));
    }
    return h;
}

std::string SpinConfig::to_line() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < spins_.size(); ++i) {
        if (i) os << ' ';
        os << static_cast<int>(spins_[i]);
    }
    return os.str();
}

SpinConfig SpinConfig::from_line(const std::string& line) {
    std::istringstream is(line);
    std::vector<int8_t> spins;
    int v;
    while (is >> v) {
        if (v != 1 && v != -1) throw std::invalid_argument("SpinConfig: entries must be +1 or -1");
        spins.push_back(static_cast<int8_t>(v));
    }
    if (spins.empty()) throw std::invalid_argument("SpinConfig: empty line");
    return SpinConfig(std::move(spins));
}

std::vector<SpinConfig> load_spin_configs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spin file: " + path);
    std::vector<SpinConfig> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(SpinConfig::from_line(line));
    }
    if (out.empty()) throw std::runtime_error("no configurations in " + path);
    return out;
}

void save_spin_configs(const std::string& path, const std::vector<SpinConfig>& configs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write spin file: " + path);
    for (const auto& c : configs) out << c.to_line() << '\n';
}

}  // namespace tising
