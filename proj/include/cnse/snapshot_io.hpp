#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnse/reference.hpp"
#include "cnse/solver.hpp"

namespace cnse {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// One snapshot record, little-endian: "CNSE", version u32, nx u32, ny u32, then Lx, Ly, time,
/// a0, gamma, mu, eta, epsilon as f64 and topology u8; rho, m1, m2 as row-major f64 arrays; for
/// channel runs the wall values u_x bottom, u_x top, u_y bottom, u_y top (nx f64 each).
/// Records of a sampled test pair set bit 0x80 of the topology byte.
void write_snapshot(std::ostream& out, const Snapshot& snapshot, const GasModel& model,
                    bool reference = false);
/// Reads one record; returns false at a clean end of stream. Gas fields are filled into model.
bool read_snapshot(std::istream& in, Snapshot& snapshot, GasModel& model,
                   bool* reference = nullptr);

void write_snapshots(const std::string& path, const Trajectory& trajectory);
/// Snapshots of a stored trajectory; config.grid, config.gas (a0, gamma, mu, eta) and
/// config.epsilon are restored from the headers, everything else is left at its default.
Trajectory read_snapshots(const std::string& path);

/// Store a test pair sampled at the given times as reference records: rho = r, m = r w, wall
/// values = w on the walls.
void write_reference(const std::string& path, const TestPair& pair, const Grid& grid,
                     const GasModel& model, const std::vector<double>& times);

}  // namespace cnse
