#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtm/common.hpp"
#include "qtm/machine.hpp"

namespace qtm {

inline constexpr std::uint64_t kDefaultSpaceCap = 1ull << 20;
inline constexpr int kDefaultWindow = 7;

// A full machine configuration: control state plus, per tape, the head
// position and the ring contents (symbol indices).
struct Configuration {
  int state = 0;
  std::vector<int> heads;
  std::vector<std::vector<int>> tapes;
};

// Qustring: unit vector over n qubits, basis ordered lexicographically over
// the length-n bit strings (amplitude i belongs to the binary expansion of i,
// most significant bit first).
struct Qustring {
  int size = 0;
  std::vector<Complex> amplitudes;

  static Qustring basis(int n, std::uint64_t value) {
    Qustring q;
    q.size = n;
    q.amplitudes.assign(std::size_t(1) << n, 0.0);
    q.amplitudes[value] = 1.0;
    return q;
  }

  void check_unit(const char* what = "qustring") const {
    double n = norm2(amplitudes);
    if (std::abs(n - 1.0) > tol::kUnitNorm)
      throw Error(errkind::kValidation, std::string(what) + " is not unit norm");
  }
};

// Explicit enumeration of all configurations of a machine over fixed ring
// windows. The canonical ordering is state-major, then head positions (tape 0
// most significant), then tape contents (tape 0 first, cell 0 most
// significant), so indices are reproducible bit for bit.
class ConfigurationSpace {
 public:
  ConfigurationSpace(const MachineDescription& m, std::vector<int> windows,
                     std::uint64_t cap = kDefaultSpaceCap)
      : machine_(&m), windows_(std::move(windows)) {
    if (int(windows_.size()) != m.tape_count())
      throw Error(errkind::kValidation, "one window length per tape required");
    for (int t : windows_)
      if (t < 5) throw Error(errkind::kValidation, "tape windows must be at least 5 cells");

    // exact size with overflow guard before comparing to the cap
    long double approx = m.state_count();
    for (int i = 0; i < m.tape_count(); ++i) {
      approx *= windows_[i];
      for (int c = 0; c < windows_[i]; ++c) approx *= m.tapes[i].size();
    }
    if (approx > 9.2e18)
      throw Error(errkind::kSpaceTooLarge, "configuration space exceeds 2^63");
    size_ = std::uint64_t(m.state_count());
    head_block_ = 1;
    content_block_ = 1;
    for (int i = 0; i < m.tape_count(); ++i) {
      head_block_ *= std::uint64_t(windows_[i]);
      std::uint64_t per_tape = 1;
      for (int c = 0; c < windows_[i]; ++c) per_tape *= std::uint64_t(m.tapes[i].size());
      tape_content_sizes_.push_back(per_tape);
      content_block_ *= per_tape;
    }
    size_ = std::uint64_t(m.state_count()) * head_block_ * content_block_;
    if (size_ > cap)
      throw Error(errkind::kSpaceTooLarge,
                  "configuration space has " + std::to_string(size_) +
                      " configurations, cap is " + std::to_string(cap));
  }

  const MachineDescription& machine() const { return *machine_; }
  const std::vector<int>& windows() const { return windows_; }
  std::uint64_t size() const { return size_; }

  std::uint64_t index_of(const Configuration& c) const {
    std::uint64_t idx = std::uint64_t(c.state);
    for (int i = 0; i < machine_->tape_count(); ++i) idx = idx * windows_[i] + std::uint64_t(c.heads[i]);
    for (int i = 0; i < machine_->tape_count(); ++i)
      for (int cell = 0; cell < windows_[i]; ++cell)
        idx = idx * machine_->tapes[i].size() + std::uint64_t(c.tapes[i][cell]);
    return idx;
  }

  Configuration configuration_of(std::uint64_t idx) const {
    Configuration c;
    const int k = machine_->tape_count();
    c.heads.resize(k);
    c.tapes.resize(k);
    for (int i = k - 1; i >= 0; --i) {
      c.tapes[i].resize(windows_[i]);
      for (int cell = windows_[i] - 1; cell >= 0; --cell) {
        c.tapes[i][cell] = int(idx % machine_->tapes[i].size());
        idx /= machine_->tapes[i].size();
      }
    }
    for (int i = k - 1; i >= 0; --i) {
      c.heads[i] = int(idx % windows_[i]);
      idx /= windows_[i];
    }
    c.state = int(idx);
    return c;
  }

  int state_of(std::uint64_t idx) const { return int(idx / (head_block_ * content_block_)); }

  int head_of(std::uint64_t idx, int tape) const {
    std::uint64_t heads = (idx / content_block_) % head_block_;
    for (int i = machine_->tape_count() - 1; i > tape; --i) heads /= std::uint64_t(windows_[i]);
    return int(heads % std::uint64_t(windows_[tape]));
  }

  // symbol index at a cell without a full decode
  int cell_of(std::uint64_t idx, int tape, int cell) const {
    std::uint64_t contents = idx % content_block_;
    for (int i = machine_->tape_count() - 1; i > tape; --i) contents /= tape_content_sizes_[i];
    contents %= tape_content_sizes_[tape];
    for (int c = windows_[tape] - 1; c > cell; --c) contents /= std::uint64_t(machine_->tapes[tape].size());
    return int(contents % std::uint64_t(machine_->tapes[tape].size()));
  }

  Configuration blank_configuration() const {
    Configuration c;
    c.state = machine_->initial;
    c.heads.assign(machine_->tape_count(), 0);
    for (int i = 0; i < machine_->tape_count(); ++i)
      c.tapes.push_back(std::vector<int>(windows_[i], machine_->tapes[i].blank_index()));
    return c;
  }

 private:
  const MachineDescription* machine_;
  std::vector<int> windows_;
  std::uint64_t size_ = 0;
  std::uint64_t head_block_ = 1;
  std::uint64_t content_block_ = 1;
  std::vector<std::uint64_t> tape_content_sizes_;
};

inline ConfigurationSpace enumerate_configurations(const MachineDescription& m,
                                                   const std::vector<int>& windows,
                                                   std::uint64_t cap = kDefaultSpaceCap) {
  return ConfigurationSpace(m, windows, cap);
}

// Initial-configuration layout on the input tape (tape 0): the classical
// input occupies cells [0,|x|), one blank separator follows, and the quantum
// index occupies the p cells after the separator (index qubit i at cell
// |x|+1+i). All other tapes start blank; heads start at cell 0.
struct InputLayout {
  static int index_cell(const std::string& x, int qubit) { return int(x.size()) + 1 + qubit; }
};

inline Configuration classical_configuration(const ConfigurationSpace& space, const std::string& x,
                                             const std::string& index_bits = "") {
  const MachineDescription& m = space.machine();
  Configuration c = space.blank_configuration();
  int t0 = space.windows()[0];
  if (int(x.size()) + 1 + int(index_bits.size()) > t0)
    throw Error(errkind::kInputTooLong,
                "input plus separator plus index needs " +
                    std::to_string(x.size() + 1 + index_bits.size()) + " cells, window has " +
                    std::to_string(t0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    int s = m.tapes[0].index_of(x[i]);
    if (s < 0) throw Error(errkind::kValidation, std::string("input symbol '") + x[i] + "' not in tape alphabet");
    c.tapes[0][i] = s;
  }
  for (std::size_t i = 0; i < index_bits.size(); ++i) {
    int s = m.tapes[0].index_of(index_bits[i]);
    if (s < 0) throw Error(errkind::kValidation, "index bits must be tape symbols");
    c.tapes[0][InputLayout::index_cell(x, int(i))] = s;
  }
  return c;
}

// State vector over the configuration space for input (x, |phi>). Basis
// strings of the index are written after the separator; a general qustring
// becomes the matching superposition of basis configurations.
inline std::vector<Complex> encode_input(const ConfigurationSpace& space, const std::string& x,
                                         const Qustring* index = nullptr) {
  std::vector<Complex> v(space.size(), 0.0);
  if (index == nullptr) {
    v[space.index_of(classical_configuration(space, x))] = 1.0;
    return v;
  }
  index->check_unit("quantum index");
  int p = index->size;
  if (std::size_t(1) << p != index->amplitudes.size())
    throw Error(errkind::kIndexSizeMismatch, "index amplitude count does not match its size");
  for (std::uint64_t t = 0; t < index->amplitudes.size(); ++t) {
    if (index->amplitudes[t] == Complex(0.0)) continue;
    std::string bits;
    for (int b = p - 1; b >= 0; --b) bits += ((t >> b) & 1) ? '1' : '0';
    v[space.index_of(classical_configuration(space, x, bits))] += index->amplitudes[t];
  }
  return v;
}

}  // namespace qtm
