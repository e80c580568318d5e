#include "tma/network.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tma {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + msg);
}

long to_long(const std::string& origin, int line, const std::string& field,
             const std::string& s) {
  try {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(origin, line, "field '" + field + "' is not an integer: '" + s + "'");
  }
}

// splits "3x2" / "3" into one or two integers
std::pair<long, long> to_pair(const std::string& origin, int line, const std::string& field,
                              const std::string& s, char sep) {
  auto p = s.find(sep);
  if (p == std::string::npos) {
    long v = to_long(origin, line, field, s);
    return {v, v};
  }
  return {to_long(origin, line, field, s.substr(0, p)),
          to_long(origin, line, field, s.substr(p + 1))};
}

Precision parse_precision(const std::string& origin, int line, const std::string& s) {
  if (s == "int5") return Precision::int5;
  if (s == "int8") return Precision::int8;
  fail(origin, line, "precision must be int5 or int8, got '" + s + "'");
}

}  // namespace

NetworkSpec parse_network(const std::string& text, const std::string& origin) {
  NetworkSpec net;
  net.name = origin;
  Precision default_prec = Precision::int5;
  bool have_input = false;
  // running output shape of the previous layer
  int h = 0, w = 0, c = 0;
  bool flat = false;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int parsed_lines = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    ++parsed_lines;

    if (word == "input") {
      long ih, iw, ic;
      if (!(ls >> ih >> iw >> ic)) fail(origin, lineno, "input needs: input <H> <W> <C>");
      if (ih < 1 || iw < 1 || ic < 1) fail(origin, lineno, "input dimensions must be positive");
      net.h = int(ih);
      net.w = int(iw);
      net.c = int(ic);
      h = net.h;
      w = net.w;
      c = net.c;
      have_input = true;
      continue;
    }
    if (word == "precision") {
      std::string p;
      if (!(ls >> p)) fail(origin, lineno, "precision needs a value");
      default_prec = parse_precision(origin, lineno, p);
      continue;
    }
    if (word != "conv" && word != "fc") fail(origin, lineno, "unknown directive '" + word + "'");
    if (!have_input) fail(origin, lineno, "layer before 'input' line");

    LayerSpec l;
    l.kind = word == "conv" ? LayerKind::conv : LayerKind::fc;
    l.precision = default_prec;
    if (!(ls >> l.name)) fail(origin, lineno, word + " needs a name");

    std::map<std::string, std::string> kv;
    std::string tok;
    while (ls >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) fail(origin, lineno, "expected key=value, got '" + tok + "'");
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto take = [&](const std::string& key) -> std::string {
      auto it = kv.find(key);
      if (it == kv.end()) return "";
      std::string v = it->second;
      kv.erase(it);
      return v;
    };

    if (l.kind == LayerKind::conv) {
      if (flat) fail(origin, lineno, "conv layer after an fc layer");
      std::string kernel = take("kernel"), filters = take("filters"), stride = take("stride");
      if (kernel.empty() || filters.empty())
        fail(origin, lineno, "conv needs kernel= and filters=");
      auto [kh, kw] = to_pair(origin, lineno, "kernel", kernel, 'x');
      l.k_h = int(kh);
      l.k_w = int(kw);
      l.k_out = int(to_long(origin, lineno, "filters", filters));
      if (!stride.empty()) {
        auto [sh, sv] = to_pair(origin, lineno, "stride", stride, 'x');
        l.s_h = int(sh);
        l.s_v = int(sv);
      }
      if (std::string p = take("pad"); !p.empty()) l.pad = int(to_long(origin, lineno, "pad", p));
      l.h_in = h;
      l.w_in = w;
      l.c_in = c;
    } else {
      std::string outputs = take("outputs");
      if (outputs.empty()) fail(origin, lineno, "fc needs outputs=");
      l.k_out = int(to_long(origin, lineno, "outputs", outputs));
      l.h_in = 1;
      l.w_in = 1;
      l.c_in = h * w * c;
      flat = true;
    }
    if (std::string p = take("requant"); !p.empty())
      l.post.requant_shift = int(to_long(origin, lineno, "requant", p));
    if (std::string p = take("pool"); !p.empty()) {
      auto [pk, ps] = to_pair(origin, lineno, "pool", p, ':');
      l.post.pool_k = int(pk);
      l.post.pool_s = int(ps);
    }
    if (std::string p = take("precision"); !p.empty())
      l.precision = parse_precision(origin, lineno, p);
    if (!kv.empty()) fail(origin, lineno, "unknown key '" + kv.begin()->first + "'");

    // validation
    if (l.k_out < 1) fail(origin, lineno, "filter/output count must be positive");
    if (l.kind == LayerKind::conv) {
      if (l.s_h < 1 || l.s_v < 1) fail(origin, lineno, "stride must be >= 1");
      if (l.k_h < 1 || l.k_w < 1) fail(origin, lineno, "kernel must be >= 1");
      if (l.k_h > 11 || l.k_w > 11) fail(origin, lineno, "kernel larger than 11 unsupported");
      if (l.pad < 0) fail(origin, lineno, "padding must be >= 0");
      if (l.h_out() < 1 || l.w_out() < 1) fail(origin, lineno, "layer output is empty");
    }
    if (l.post.requant_shift < 0 || l.post.requant_shift > 32)
      fail(origin, lineno, "requant shift out of range [0, 32]");
    if (l.post.pool_k) {
      if (l.post.pool_k < 1 || l.post.pool_s < 1)
        fail(origin, lineno, "pool size/stride must be >= 1");
      if (l.kind == LayerKind::fc) fail(origin, lineno, "pooling on an fc layer");
      if (l.h_final() < 1 || l.w_final() < 1) fail(origin, lineno, "pooled output is empty");
    }

    net.layers.push_back(l);
    if (l.kind == LayerKind::conv) {
      h = l.h_final();
      w = l.w_final();
      c = l.k_out;
    } else {
      h = 1;
      w = 1;
      c = l.k_out;
    }
  }

  if (parsed_lines == 0) fail(origin, lineno == 0 ? 1 : lineno, "empty network description");
  if (!have_input) fail(origin, 1, "missing 'input' line");
  if (net.layers.empty()) fail(origin, lineno, "network has no layers");
  return net;
}

NetworkSpec load_network(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open network file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_network(ss.str(), path);
}

}  // namespace tma
