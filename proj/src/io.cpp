#include "lrsim/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "lrsim/errors.hpp"

namespace lrsim {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidParameter("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidParameter("trailing characters in number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out << text;
}

namespace {

std::string join_doubles(const double* v, Index count, char sep) {
  std::string out;
  for (Index i = 0; i < count; ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s, char sep) {
  std::vector<double> out;
  for (const auto& piece : split(s, sep)) out.push_back(parse_double(piece));
  return out;
}

std::string truth_link_field(const TruthLink& link) {
  if (link.kind() == TruthLink::Kind::Tanh) return "tanh:" + format_double(link.scale());
  const auto& beta = link.expansion().coefficients();
  return "dictionary:" + join_doubles(beta.data(), beta.size(), ';');
}

}  // namespace

std::string dataset_to_string(const LabeledDataset& data) {
  std::ostringstream os;
  const Index d = data.d;
  os << kDatasetMagic << '\n';
  os << "# d=" << d << '\n';
  os << "# n=" << data.n() << '\n';
  os << "# noise=" << to_string(data.noise.kind) << '\n';
  os << "# sigma=" << format_double(data.noise.sigma) << '\n';
  os << "# L=" << format_double(data.noise.L()) << '\n';
  os << "# seed=" << data.seed << '\n';
  os << "# truth=" << data.truth_description << '\n';
  if (data.truth) {
    const TruthSpec& t = *data.truth;
    os << "# truth_rank=" << t.rank << '\n';
    os << "# truth_C=" << format_double(t.C) << '\n';
    if (t.sobolev_k) os << "# truth_sobolev_k=" << format_double(*t.sobolev_k) << '\n';
    const Vector b = flatten(t.B_star.dense());
    os << "# truth_B=" << join_doubles(b.data(), b.size(), ';') << '\n';
    os << "# truth_link=" << truth_link_field(t.f_star) << '\n';
  }
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) os << "x_" << r + 1 << '_' << c + 1 << ',';
  }
  os << "y\n";
  for (int i = 0; i < data.n(); ++i) {
    for (Index k = 0; k < d * d; ++k) os << format_double(data.x(i, k)) << ',';
    os << format_double(data.y[i]) << '\n';
  }
  return os.str();
}

void write_dataset(const std::filesystem::path& path, const LabeledDataset& data) {
  write_text(path, dataset_to_string(data));
}

LabeledDataset dataset_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kDatasetMagic) throw InvalidParameter("missing dataset header");
  std::map<std::string, std::string> header;
  std::vector<std::string> rows;
  bool columns_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw InvalidParameter("malformed header line: " + line);
      header[line.substr(2, eq - 2)] = line.substr(eq + 1);
    } else if (!columns_seen) {
      columns_seen = true;
    } else {
      rows.push_back(line);
    }
  }
  auto need = [&](const std::string& key) {
    auto it = header.find(key);
    if (it == header.end()) throw InvalidParameter("dataset header lacks '" + key + "'");
    return it->second;
  };
  LabeledDataset data;
  data.d = std::stol(need("d"));
  const int n = std::stoi(need("n"));
  data.noise.kind = parse_noise_kind(need("noise"));
  data.noise.sigma = parse_double(need("sigma"));
  data.seed = std::stoull(need("seed"));
  data.truth_description = need("truth");
  if (static_cast<int>(rows.size()) != n) throw InvalidParameter("dataset record count differs from header n");
  const Index d2 = data.d * data.d;
  data.x.resize(n, d2);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto v = parse_doubles(rows[static_cast<std::size_t>(i)], ',');
    if (static_cast<Index>(v.size()) != d2 + 1) throw InvalidParameter("record " + std::to_string(i) + " has wrong width");
    for (Index k = 0; k < d2; ++k) data.x(i, k) = v[static_cast<std::size_t>(k)];
    data.y[i] = v.back();
  }
  if (header.count("truth_B") && header.count("truth_link")) {
    const auto b = parse_doubles(header["truth_B"], ';');
    if (static_cast<Index>(b.size()) != d2) throw InvalidParameter("truth_B has wrong size");
    Matrix bm(data.d, data.d);
    for (Index r = 0; r < data.d; ++r) {
      for (Index c = 0; c < data.d; ++c) bm(r, c) = b[static_cast<std::size_t>(r * data.d + c)];
    }
    const double C = parse_double(need("truth_C"));
    const std::string link = header["truth_link"];
    const auto colon = link.find(':');
    if (colon == std::string::npos) throw InvalidParameter("malformed truth_link");
    const std::string kind = link.substr(0, colon);
    std::optional<TruthLink> f;
    if (kind == "tanh") {
      f = TruthLink::tanh(parse_double(link.substr(colon + 1)));
    } else if (kind == "dictionary") {
      const auto beta = parse_doubles(link.substr(colon + 1), ';');
      f = TruthLink::dictionary(LinkFunction(Eigen::Map<const Vector>(beta.data(), static_cast<Index>(beta.size())), C));
    } else {
      throw InvalidParameter("unknown truth link kind '" + kind + "'");
    }
    std::optional<double> k;
    if (header.count("truth_sobolev_k")) k = parse_double(header["truth_sobolev_k"]);
    data.truth = TruthSpec{data.d, std::stoi(need("truth_rank")), IndexMatrix::from_dense(bm), *f, C, k};
  }
  return data;
}

LabeledDataset read_dataset(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("dataset file not found: " + path.string());
  return dataset_from_string(read_text(path));
}

std::string draws_to_string(const std::vector<PosteriorDraw>& draws, Index d) {
  std::ostringstream os;
  os << kDrawsMagic << " d=" << d << '\n';
  os << "seed,iteration,M,beta";
  for (Index i = 0; i < d; ++i) os << ",gamma_" << i + 1;
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) os << ",B_" << r + 1 << '_' << c + 1;
  }
  os << ",r_n\n";
  for (const auto& draw : draws) {
    os << draw.seed << ',' << draw.iteration << ',' << draw.M() << ','
       << join_doubles(draw.beta.data(), draw.beta.size(), ';') << ','
       << join_doubles(draw.gamma.data(), draw.gamma.size(), ',') << ',';
    const Vector b = flatten(draw.B);
    os << join_doubles(b.data(), b.size(), ',') << ',' << format_double(draw.risk) << '\n';
  }
  return os.str();
}

void write_draws(const std::filesystem::path& path, const std::vector<PosteriorDraw>& draws, Index d) {
  write_text(path, draws_to_string(draws, d));
}

std::vector<PosteriorDraw> draws_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind(kDrawsMagic, 0) != 0) throw InvalidParameter("missing draws header");
  const auto pos = line.find("d=");
  if (pos == std::string::npos) throw InvalidParameter("draws header lacks d");
  const Index d = std::stol(line.substr(pos + 2));
  if (!std::getline(in, line)) throw InvalidParameter("draws file lacks column line");
  std::vector<PosteriorDraw> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (static_cast<Index>(f.size()) != 4 + d + d * d + 1) throw InvalidParameter("draw record has wrong width");
    PosteriorDraw draw;
    draw.seed = std::stoull(f[0]);
    draw.iteration = std::stol(f[1]);
    const int m = std::stoi(f[2]);
    const auto beta = parse_doubles(f[3], ';');
    if (static_cast<int>(beta.size()) != m) throw InvalidParameter("beta length differs from M");
    draw.beta = Eigen::Map<const Vector>(beta.data(), m);
    draw.gamma.resize(d);
    for (Index i = 0; i < d; ++i) draw.gamma[i] = parse_double(f[static_cast<std::size_t>(4 + i)]);
    draw.B.resize(d, d);
    for (Index r = 0; r < d; ++r) {
      for (Index c = 0; c < d; ++c) draw.B(r, c) = parse_double(f[static_cast<std::size_t>(4 + d + r * d + c)]);
    }
    draw.risk = parse_double(f.back());
    out.push_back(std::move(draw));
  }
  return out;
}

std::vector<PosteriorDraw> read_draws(const std::filesystem::path& path) { return draws_from_string(read_text(path)); }

}  // namespace lrsim
