#include <fstream>
#include <iostream>

#include "dirac/script.hpp"

namespace {

using namespace dirac;
using namespace dirac::script;

int usage() {
  std::cerr << "usage: dirac run <file.dirac> [--degree-bound N] [--emit text|json]\n"
               "       dirac repl [--degree-bound N]\n"
               "       dirac selftest\n";
  return 2;
}

Options options_from_env() {
  Options o;
  if (const char* env = std::getenv("DIRAC_DEGREE_BOUND")) {
    int v = std::atoi(env);
    if (v > 0) o.degree_bound = v;
  }
  return o;
}

int run_file(const std::string& path, const Options& opts, const std::string& format) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    return 1;
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Script s;
  try {
    s = parse_script(text);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  auto reports = execute(s, opts);
  if (format == "json")
    std::cout << emit_json(reports) << "\n";
  else
    std::cout << emit_text(reports);
  for (const auto& r : reports)
    if (r.status == "error") return 1;
  return 0;
}

int repl(const Options& opts) {
  Session session;
  session.opts = opts;
  std::string line;
  while (true) {
    std::cout << "dirac> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line == "exit" || line == "quit") break;
    Script s;
    try {
      s = parse_script(line);
    } catch (const ParseError& e) {
      std::cout << "error: " << e.what() << "\n";
      continue;
    }
    for (const auto& st : s.statements) std::cout << emit_text(session.execute(st));
  }
  return 0;
}

struct SelfCheck {
  std::string name;
  std::string script;
  std::string expect;  // substring of the last report payload
};

int selftest() {
  const std::vector<SelfCheck> checks = {
      {"odd line torsion",
       "base Z\nring A = free(t:-1)\npiece A at -2",
       "rank 0, torsion [2]"},
      {"signed partials",
       "base Q\nring A = free()\nideal I = ()\nalg A0 = A / I\n"
       "ring B = free(x:-1, y:-3)\nideal J = (x*y)\nalg C = B / J\n"
       "map f : A0 -> C = []\njacobian f",
       "-1*y^1"},
      {"sierpinski spectrum",
       "base Q\nring A = free(g:-2)\nspec A",
       "\"specializations\":[[0,1]]"},
      {"unit cover",
       "base Z\nring A = free()\nideal I = ()\nalg B = A / I\ncover C = (B: 2, 3)\n"
       "amitsur C",
       "exact"},
      {"even localization",
       "base F5\nring A = free(x:-2)\nlocalize A at x",
       "degree -2"},
      {"residue minimal generators",
       "base F2\nring A = free(x:-2)\nideal I = (x^3)\nalg B = A / I\n"
       "module K = residue(B)\nminimalgens K",
       "1 generator(s)"},
  };
  int failures = 0;
  for (const auto& c : checks) {
    bool ok = false;
    std::string detail;
    try {
      auto reports = execute(parse_script(c.script), Options{});
      if (!reports.empty()) {
        const auto& last = reports.back();
        ok = last.status != "error" && last.payload.find(c.expect) != std::string::npos;
        detail = last.payload;
      }
    } catch (const std::exception& e) {
      detail = e.what();
    }
    std::cout << (ok ? "pass" : "FAIL") << ": " << c.name;
    if (!ok) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return usage();
  std::string cmd = argv[1];
  Options opts = options_from_env();
  std::string format = "text";
  std::string file;
  for (int i = 2; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--degree-bound" && i + 1 < argc) {
      opts.degree_bound = std::atoi(argv[++i]);
      if (opts.degree_bound <= 0) return usage();
    } else if (a == "--emit" && i + 1 < argc) {
      format = argv[++i];
      if (format != "text" && format != "json") return usage();
    } else if (a[0] != '-' && file.empty()) {
      file = a;
    } else {
      return usage();
    }
  }
  if (cmd == "run") {
    if (file.empty()) return usage();
    return run_file(file, opts, format);
  }
  if (cmd == "repl") return repl(opts);
  if (cmd == "selftest") return selftest();
  return usage();
}
