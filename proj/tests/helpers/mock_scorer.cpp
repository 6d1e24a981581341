// Test double for the external-scorer protocol: one JSON object per line on
// stdin/stdout. Scores are a deterministic hash of (premise, hypothesis,
// state); fit/load bump or set the state so tests can observe that requests
// actually reached the child. Magic premises: "__sleep__" stalls before
// replying, "__die__" exits without one.

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "ifsc/rng.hpp"

using nlohmann::json;

int main() {
  long state = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    json req;
    try {
      req = json::parse(line);
    } catch (...) {
      std::cout << json{{"ok", false}, {"error", "bad json"}}.dump() << "\n" << std::flush;
      continue;
    }
    const std::string op = req.value("op", "");
    if (op == "score") {
      const std::string premise = req.value("premise", "");
      const std::string hypothesis = req.value("hypothesis", "");
      if (premise == "__die__") return 7;
      if (premise == "__sleep__") ::sleep(5);
      const uint64_t h = ifsc::fnv1a64(premise + "\x1f" + hypothesis + "\x1f" +
                                       std::to_string(state));
      const double score = static_cast<double>(h % 1000) / 999.0;
      std::cout << json{{"id", req.value("id", 0L)}, {"score", score}}.dump() << "\n"
                << std::flush;
    } else if (op == "fit") {
      std::ifstream pairs(req.value("pairs_path", ""));
      if (!pairs) {
        std::cout << json{{"ok", false}, {"error", "no pairs file"}}.dump() << "\n" << std::flush;
        continue;
      }
      std::string l;
      long n = 0;
      while (std::getline(pairs, l))
        if (!l.empty()) ++n;
      state += n;
      std::cout << json{{"ok", true}, {"pairs", n}}.dump() << "\n" << std::flush;
    } else if (op == "save") {
      std::ofstream out(req.value("path", ""));
      if (!out) {
        std::cout << json{{"ok", false}, {"error", "cannot write"}}.dump() << "\n" << std::flush;
        continue;
      }
      out << json{{"state", state}}.dump() << "\n";
      std::cout << json{{"ok", true}}.dump() << "\n" << std::flush;
    } else if (op == "load") {
      std::ifstream in(req.value("path", ""));
      json j;
      try {
        in >> j;
        state = j.at("state").get<long>();
      } catch (...) {
        std::cout << json{{"ok", false}, {"error", "bad checkpoint"}}.dump() << "\n"
                  << std::flush;
        continue;
      }
      std::cout << json{{"ok", true}}.dump() << "\n" << std::flush;
    } else {
      std::cout << json{{"ok", false}, {"error", "unknown op"}}.dump() << "\n" << std::flush;
    }
  }
  return 0;
}
