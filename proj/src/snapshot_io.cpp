#include "cnse/snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace cnse {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

constexpr char kMagic[4] = {'C', 'N', 'S', 'E'};
constexpr std::uint8_t kReferenceBit = 0x80;

template <typename T>
void put(std::ostream& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  in.read(buf, sizeof(T));
  if (!in) throw IoError("truncated snapshot record");
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

void put_array(std::ostream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void put_field(std::ostream& out, const ScalarField& f) {
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
}

void get_array(std::istream& in, double* data, std::size_t n) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw IoError("truncated snapshot record");
}

}  // namespace

void write_snapshot(std::ostream& out, const Snapshot& snapshot, const GasModel& model,
                    bool reference) {
  const State& s = snapshot.state;
  const Grid& g = s.grid();
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.nx));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.ny));
  for (double v : {g.Lx, g.Ly, s.time, model.a0, model.gamma, model.mu, model.eta, s.epsilon})
    put<double>(out, v);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(static_cast<std::uint8_t>(g.topology) |
                                                  (reference ? kReferenceBit : 0)));
  put_field(out, s.rho);
  put_field(out, s.mom.x);
  put_field(out, s.mom.y);
  if (g.has_walls()) {
    const std::vector<double> zeros(static_cast<std::size_t>(g.nx), 0.0);
    const VectorWallValues& w = snapshot.wall;
    for (const std::vector<double>* v : {&w.x.bottom, &w.x.top, &w.y.bottom, &w.y.top})
      put_array(out, v->empty() ? zeros : *v);
  }
  if (!out) throw IoError("failed to write snapshot record");
}

bool read_snapshot(std::istream& in, Snapshot& snapshot, GasModel& model, bool* reference) {
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() == 0 && in.eof()) return false;
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw IoError("bad snapshot magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kSnapshotVersion)
    throw IoError("unsupported snapshot version " + std::to_string(version));
  const auto nx = get<std::uint32_t>(in);
  const auto ny = get<std::uint32_t>(in);
  double h[8];
  for (double& v : h) v = get<double>(in);
  const auto code = get<std::uint8_t>(in);
  if (reference) *reference = (code & kReferenceBit) != 0;
  const auto topo = static_cast<std::uint8_t>(code & ~kReferenceBit);
  if (topo > 1) throw IoError("unknown topology code " + std::to_string(topo));
  const Grid g = Grid::make(static_cast<int>(nx), static_cast<int>(ny), h[0], h[1],
                            static_cast<Topology>(topo));
  model.a0 = h[3];
  model.gamma = h[4];
  model.mu = h[5];
  model.eta = h[6];
  State s(g);
  s.time = h[2];
  s.epsilon = h[7];
  get_array(in, s.rho.values().data(), g.size());
  get_array(in, s.mom.x.values().data(), g.size());
  get_array(in, s.mom.y.values().data(), g.size());
  snapshot.state = std::move(s);
  snapshot.wall = {};
  if (g.has_walls()) {
    VectorWallValues& w = snapshot.wall;
    for (std::vector<double>* v : {&w.x.bottom, &w.x.top, &w.y.bottom, &w.y.top}) {
      v->assign(nx, 0.0);
      get_array(in, v->data(), nx);
    }
  }
  return true;
}

void write_snapshots(const std::string& path, const Trajectory& trajectory) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const Snapshot& s : trajectory.snapshots) write_snapshot(out, s, trajectory.config.gas);
  out.flush();
  if (!out) throw IoError("failed to write " + path);
}

Trajectory read_snapshots(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Trajectory t;
  Snapshot s;
  GasModel model;
  while (read_snapshot(in, s, model)) {
    if (t.snapshots.empty()) {
      t.config.grid = s.state.grid();
      t.config.gas.a0 = model.a0;
      t.config.gas.gamma = model.gamma;
      t.config.gas.mu = model.mu;
      t.config.gas.eta = model.eta;
      t.config.epsilon = s.state.epsilon;
    } else if (!(s.state.grid() == t.config.grid)) {
      throw IoError("snapshot grids differ within " + path);
    }
    t.snapshots.push_back(std::move(s));
  }
  return t;
}

void write_reference(const std::string& path, const TestPair& pair, const Grid& grid,
                     const GasModel& model, const std::vector<double>& times) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (double t : times) {
    const PairSample ps = pair.sample(grid, model, t);
    Snapshot s;
    s.state = State(grid);
    s.state.time = t;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      s.state.rho[k] = ps.r[k];
      s.state.mom.x[k] = ps.r[k] * ps.w.x[k];
      s.state.mom.y[k] = ps.r[k] * ps.w.y[k];
    }
    s.wall = ps.w_wall;
    write_snapshot(out, s, model, true);
  }
  out.flush();
  if (!out) throw IoError("failed to write " + path);
}

}  // namespace cnse
