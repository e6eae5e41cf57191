#include "fincap/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "fincap/error.hpp"

namespace fincap::pde {

namespace {

static_assert(std::endian::native == std::endian::little, "field files are written in host order");

constexpr char kMagic[8] = {'F', 'I', 'N', 'C', 'A', 'P', 'F', '1'};

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw InvalidArgument("field file truncated");
  return v;
}

nlohmann::json meta_json(const FieldMeta& m) {
  return {{"problem", m.problem}, {"norm", m.norm},         {"body", m.body},
          {"bc_inner", m.bc_inner}, {"bc_outer", m.bc_outer}, {"source", m.source}};
}

}  // namespace

void write_field(const ScalarField& field, const std::string& path) {
  if (!field.domain || field.values.size() != field.domain->size())
    throw InvalidArgument("write_field: field does not match its domain");
  const auto& d = *field.domain;
  nlohmann::json meta = meta_json(field.meta);
  std::array<double, 3> spacing{}, origin{};
  for (int a = 0; a < 3; ++a) {
    const auto& x = d.axis(a);
    meta["axes"].push_back(x);
    origin[static_cast<std::size_t>(a)] = x.front();
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < x.size(); ++i) h = std::min(h, x[i] - x[i - 1]);
    spacing[static_cast<std::size_t>(a)] = h;
  }
  const std::string text = meta.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("write_field: cannot open " + path);
  out.write(kMagic, sizeof(kMagic));
  for (int a = 0; a < 3; ++a) put<std::int64_t>(out, d.n(a));
  for (double h : spacing) put(out, h);
  for (double o : origin) put(out, o);
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (!out) throw InvalidArgument("write_field: write failed for " + path);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t region = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.kind(i) == NodeKind::Outside) continue;
    ++region;
    lo = std::min(lo, field.values[i]);
    hi = std::max(hi, field.values[i]);
  }
  const auto rep = d.report();
  nlohmann::json side = {
      {"file", path},
      {"dims", {d.n(0), d.n(1), d.n(2)}},
      {"spacing", spacing},
      {"origin", origin},
      {"meta", meta_json(field.meta)},
      {"summary",
       {{"region_nodes", region},
        {"active", rep.active},
        {"fixed", rep.fixed},
        {"cut_edges", rep.cut_edges},
        {"min", region ? lo : 0.0},
        {"max", region ? hi : 0.0}}},
  };
  std::ofstream js(path + ".json", std::ios::trunc);
  if (!js) throw InvalidArgument("write_field: cannot open " + path + ".json");
  js << side.dump(2) << '\n';
}

FieldFile read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("read_field: cannot open " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw InvalidArgument("read_field: not a field file: " + path);
  FieldFile f;
  for (auto& n : f.dims) n = get<std::int64_t>(in);
  for (auto& h : f.spacing) h = get<double>(in);
  for (auto& o : f.origin) o = get<double>(in);
  const auto len = get<std::uint64_t>(in);
  if (len > (1u << 30)) throw InvalidArgument("read_field: metadata too large");
  f.metadata.resize(len);
  if (!in.read(f.metadata.data(), static_cast<std::streamsize>(len))) throw InvalidArgument("field file truncated");
  const auto meta = nlohmann::json::parse(f.metadata);
  f.meta.problem = meta.value("problem", "");
  f.meta.norm = meta.value("norm", "");
  f.meta.body = meta.value("body", "");
  f.meta.bc_inner = meta.value("bc_inner", 0.0);
  f.meta.bc_outer = meta.value("bc_outer", 0.0);
  f.meta.source = meta.value("source", 0.0);
  std::size_t count = 1;
  for (int a = 0; a < 3; ++a) {
    if (f.dims[static_cast<std::size_t>(a)] < 2) throw InvalidArgument("read_field: bad dimensions");
    f.axes[static_cast<std::size_t>(a)] = meta.at("axes").at(static_cast<std::size_t>(a)).get<std::vector<double>>();
    if (static_cast<long long>(f.axes[static_cast<std::size_t>(a)].size()) != f.dims[static_cast<std::size_t>(a)])
      throw InvalidArgument("read_field: axes do not match dimensions");
    count *= static_cast<std::size_t>(f.dims[static_cast<std::size_t>(a)]);
  }
  f.values.resize(count);
  if (!in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(count * sizeof(double))))
    throw InvalidArgument("field file truncated");
  return f;
}

}  // namespace fincap::pde
