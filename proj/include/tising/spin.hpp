#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tising {

// A +/-1 configuration of length n.
class SpinConfig {
public:
    SpinConfig() = default;
    explicit SpinConfig(std::vector<int8_t> spins);
    static SpinConfig all_plus(int n);

    int n() const { return static_cast<int>(spins_.size()); }
    int8_t operator[](int i) const { return spins_[static_cast<std::size_t>(i)]; }
    const std::vector<int8_t>& spins() const { return spins_; }

    void flip(int i) { spins_[static_cast<std::size_t>(i)] = static_cast<int8_t>(-spins_[static_cast<std::size_t>(i)]); }
    void set(int i, int8_t s);

    long long spin_sum() const;
    double mean() const;
    std::uint64_t hash() const;

    std::string to_line() const;
    static SpinConfig from_line(const std::string& line);

private:
    std::vector<int8_t> spins_;
};

std::vector<SpinConfig> load_spin_configs(const std::string& path);
void save_spin_configs(const std::string& path, const std::vector<SpinConfig>& configs);

}  // namespace tising
