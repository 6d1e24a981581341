#include "ifsc/pairgen.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "ifsc/errors.hpp"
#include "ifsc/io.hpp"

namespace ifsc {

using nlohmann::json;

PairMode pair_mode_from_string(const std::string& s) {
  if (s == "entail") return PairMode::kEntailment;
  if (s == "dnnc") return PairMode::kDnnc;
  if (s == "hybrid") return PairMode::kHybrid;
  throw ConfigError("unknown pair mode '" + s + "' (expected entail|dnnc|hybrid)");
}

std::string to_string(PairMode mode) {
  switch (mode) {
    case PairMode::kEntailment: return "entail";
    case PairMode::kDnnc: return "dnnc";
    case PairMode::kHybrid: return "hybrid";
  }
  return "?";
}

PairBundle PairBundle::from_phase(const PhaseData& phase) {
  PairBundle bundle;
  std::map<std::string, size_t> index;
  for (const ClassDef& cls : phase.classes) {
    index[cls.class_id] = bundle.classes.size();
    bundle.classes.push_back(ClassExamples{cls, {}});
  }
  for (const Example& ex : phase.train) {
    auto it = index.find(ex.class_id);
    if (it == index.end())
      throw DataError("train example '" + ex.id + "' belongs to class '" + ex.class_id +
                      "' outside the phase");
    bundle.classes[it->second].examples.push_back(ex);
  }
  return bundle;
}

std::vector<int> PairBundle::shot_counts() const {
  std::vector<int> ks;
  ks.reserve(classes.size());
  for (const ClassExamples& c : classes) ks.push_back(static_cast<int>(c.examples.size()));
  return ks;
}

std::string label_hypothesis(const ClassDef& cls) {
  std::string text = cls.label_name;
  for (char& c : text)
    if (c == '_' || c == '-') c = ' ';
  return text;
}

namespace {

struct Item {
  const Example* example;
  const ClassDef* cls;
};

// All examples of the bundle sorted by example id; ids are unique, so the
// order (and the emitted pair list) is fully determined by the input.
std::vector<Item> sorted_items(const PairBundle& bundle) {
  std::vector<Item> items;
  for (const ClassExamples& ce : bundle.classes)
    for (const Example& ex : ce.examples) items.push_back(Item{&ex, &ce.cls});
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.example->id < b.example->id; });
  return items;
}

}  // namespace

PairSet gen_entailment_pairs(const PairBundle& bundle) {
  if (bundle.classes.empty()) throw DataError("pair bundle has no classes");

  std::vector<const ClassDef*> labels;
  for (const ClassExamples& ce : bundle.classes) {
    if (trim(ce.cls.label_name).empty())
      throw DataError("class '" + ce.cls.class_id + "' has an empty label name");
    labels.push_back(&ce.cls);
  }
  for (const ClassDef& cls : bundle.extra_negative_labels) labels.push_back(&cls);
  std::sort(labels.begin(), labels.end(),
            [](const ClassDef* a, const ClassDef* b) { return a->class_id < b->class_id; });

  PairSet out;
  for (const Item& item : sorted_items(bundle)) {
    Pair positive;
    positive.premise = item.example->text;
    positive.hypothesis = label_hypothesis(*item.cls);
    positive.positive = true;
    positive.origin = PairOrigin::kEntailment;
    positive.premise_id = item.example->id;
    positive.hypothesis_id = item.cls->class_id;
    out.push(std::move(positive));

    for (const ClassDef* label : labels) {
      if (label->class_id == item.cls->class_id) continue;
      Pair negative;
      negative.premise = item.example->text;
      negative.hypothesis = label_hypothesis(*label);
      negative.positive = false;
      negative.origin = PairOrigin::kEntailment;
      negative.premise_id = item.example->id;
      negative.hypothesis_id = label->class_id;
      out.push(std::move(negative));
    }
  }
  return out;
}

PairSet gen_dnnc_pairs(const PairBundle& bundle) {
  if (bundle.classes.empty()) throw DataError("pair bundle has no classes");
  const std::vector<Item> items = sorted_items(bundle);

  PairSet out;
  for (const Item& a : items) {
    for (const Item& b : items) {
      if (a.example->id == b.example->id) continue;
      Pair pair;
      pair.premise = a.example->text;
      pair.hypothesis = b.example->text;
      pair.positive = a.cls->class_id == b.cls->class_id;
      pair.origin = PairOrigin::kDnnc;
      pair.premise_id = a.example->id;
      pair.hypothesis_id = b.example->id;
      out.push(std::move(pair));
    }
  }
  return out;
}

PairSet gen_hybrid_pairs(const PairBundle& bundle) {
  PairSet out = gen_entailment_pairs(bundle);
  out.append(gen_dnnc_pairs(bundle));
  return out;
}

PairSet gen_pairs(PairMode mode, const PairBundle& bundle) {
  switch (mode) {
    case PairMode::kEntailment: return gen_entailment_pairs(bundle);
    case PairMode::kDnnc: return gen_dnnc_pairs(bundle);
    case PairMode::kHybrid: return gen_hybrid_pairs(bundle);
  }
  throw ConfigError("bad pair mode");
}

PairCounts expected_counts(PairMode mode, int h, const std::vector<int>& ks) {
  if (ks.empty()) throw ConfigError("expected_counts: empty shot list");
  if (h != static_cast<int>(ks.size()))
    throw ConfigError("expected_counts: h = " + std::to_string(h) + " but |ks| = " +
                      std::to_string(ks.size()));
  long long sum_k = 0;
  long long sum_k2 = 0;
  long long sum_kk1 = 0;
  for (int k : ks) {
    if (k < 1) throw ConfigError("expected_counts: shots must be >= 1");
    sum_k += k;
    sum_k2 += static_cast<long long>(k) * k;
    sum_kk1 += static_cast<long long>(k) * (k - 1);
  }
  switch (mode) {
    case PairMode::kEntailment: return {sum_k, (h - 1) * sum_k};
    case PairMode::kDnnc: return {sum_kk1, sum_k * sum_k - sum_k2};
    case PairMode::kHybrid: {
      const PairCounts e = expected_counts(PairMode::kEntailment, h, ks);
      const PairCounts d = expected_counts(PairMode::kDnnc, h, ks);
      return {e.positive + d.positive, e.negative + d.negative};
    }
  }
  throw ConfigError("bad pair mode");
}

void write_pairs_jsonl(const PairSet& pairs, const std::string& path) {
  std::string out;
  for (const Pair& p : pairs.pairs) {
    json j{{"premise", p.premise},
           {"hypothesis", p.hypothesis},
           {"label", p.positive ? "entail" : "not_entail"},
           {"origin", p.origin == PairOrigin::kEntailment ? "ent" : "dnnc"}};
    out += j.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

PairSet read_pairs_jsonl(const std::string& path) {
  PairSet out;
  const auto lines = split_lines(read_text_file(path));
  for (size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw DataError(path + ": parse error at line " + std::to_string(i + 1) + ": " + e.what());
    }
    Pair p;
    try {
      p.premise = j.at("premise").get<std::string>();
      p.hypothesis = j.at("hypothesis").get<std::string>();
      const std::string label = j.at("label").get<std::string>();
      if (label == "entail")
        p.positive = true;
      else if (label == "not_entail")
        p.positive = false;
      else
        throw DataError(path + ": line " + std::to_string(i + 1) + ": bad label '" + label + "'");
      const std::string origin = j.value("origin", "ent");
      p.origin = origin == "dnnc" ? PairOrigin::kDnnc : PairOrigin::kEntailment;
    } catch (const json::exception& e) {
      throw DataError(path + ": line " + std::to_string(i + 1) + ": " + e.what());
    }
    out.push(std::move(p));
  }
  return out;
}

}  // namespace ifsc
