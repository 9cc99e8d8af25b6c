#include "hpmine/json_schema.hpp"

#include <cmath>
#include <regex>
#include <stdexcept>

#include "hpmine/embedded_schemas.hpp"

namespace hpmine {

namespace {

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape_pointer(const std::string& tok) {
  std::string out;
  for (std::size_t i = 0; i < tok.size(); ++i) {
    if (tok[i] == '~' && i + 1 < tok.size()) {
      out += tok[i + 1] == '1' ? '/' : '~';
      ++i;
    } else if (tok[i] == '%' && i + 2 < tok.size()) {
      out += static_cast<char>(std::stoi(tok.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += tok[i];
    }
  }
  return out;
}

std::size_t code_points(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

bool type_matches(const std::string& type, const Json& v) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") return is_json_integer(v);
  return false;
}

class Run {
 public:
  Run(const Json& root, std::vector<ValidationError>* errors) : root_(root), errors_(errors) {}

  bool check(const Json& schema, const Json& v, const std::string& ipath, const std::string& spath, int depth = 0) {
    if (depth > 256) {
      fail(ipath, spath, "schema recursion too deep");
      return false;
    }
    if (!schema.is_object()) return true;
    if (auto it = schema.find("$ref"); it != schema.end() && it->is_string()) {
      const Json* target = resolve(it->get<std::string>());
      if (!target) {
        fail(ipath, spath + "/$ref", "unresolvable reference " + it->get<std::string>());
        return false;
      }
      const Json& base = (it->get<std::string>().rfind(kDraft04Uri, 0) == 0) ? draft04_metaschema() : root_;
      Run sub(base, errors_);
      return sub.check(*target, v, ipath, spath + "/$ref", depth + 1);
    }
    bool ok = true;
    auto kw = [&](const char* k) -> const Json* {
      auto it = schema.find(k);
      return it == schema.end() ? nullptr : &*it;
    };

    if (const Json* t = kw("type")) {
      bool any = false;
      if (t->is_string()) {
        any = type_matches(t->get<std::string>(), v);
      } else if (t->is_array()) {
        for (const auto& x : *t) any = any || (x.is_string() && type_matches(x.get<std::string>(), v));
      } else {
        any = true;
      }
      if (!any) ok = fail(ipath, spath + "/type", v.type_name() + std::string(" is not of type ") + t->dump());
    }
    if (const Json* e = kw("enum"); e && e->is_array()) {
      bool found = false;
      for (const auto& x : *e) found = found || x == v;
      if (!found) ok = fail(ipath, spath + "/enum", v.dump() + " is not one of " + e->dump());
    }

    if (v.is_number()) {
      double x = v.get<double>();
      if (const Json* m = kw("minimum"); m && m->is_number()) {
        const Json* ex = kw("exclusiveMinimum");
        bool excl = ex && ex->is_boolean() && ex->get<bool>();
        double b = m->get<double>();
        if (excl ? !(x > b) : !(x >= b)) ok = fail(ipath, spath + "/minimum", v.dump() + " is below the minimum " + m->dump());
      }
      if (const Json* m = kw("maximum"); m && m->is_number()) {
        const Json* ex = kw("exclusiveMaximum");
        bool excl = ex && ex->is_boolean() && ex->get<bool>();
        double b = m->get<double>();
        if (excl ? !(x < b) : !(x <= b)) ok = fail(ipath, spath + "/maximum", v.dump() + " is above the maximum " + m->dump());
      }
      if (const Json* m = kw("multipleOf"); m && m->is_number() && m->get<double>() > 0) {
        double q = x / m->get<double>();
        if (!std::isfinite(q) || std::fabs(q - std::round(q)) > 1e-9 * std::max(1.0, std::fabs(q))) {
          ok = fail(ipath, spath + "/multipleOf", v.dump() + " is not a multiple of " + m->dump());
        }
      }
    }

    if (v.is_string()) {
      auto len = code_points(v.get<std::string>());
      if (const Json* m = kw("maxLength"); m && m->is_number() && len > m->get<double>()) {
        ok = fail(ipath, spath + "/maxLength", "string is too long");
      }
      if (const Json* m = kw("minLength"); m && m->is_number() && len < m->get<double>()) {
        ok = fail(ipath, spath + "/minLength", "string is too short");
      }
      if (const Json* m = kw("pattern"); m && m->is_string()) {
        try {
          std::regex re(m->get<std::string>(), std::regex::ECMAScript);
          const auto& s = v.get_ref<const std::string&>();
          if (!std::regex_search(s, re)) ok = fail(ipath, spath + "/pattern", v.dump() + " does not match " + m->dump());
        } catch (const std::regex_error&) {
          ok = fail(ipath, spath + "/pattern", "unsupported pattern " + m->dump());
        }
      }
    }

    if (v.is_array()) {
      if (const Json* items = kw("items")) {
        if (items->is_object()) {
          for (std::size_t i = 0; i < v.size(); ++i) {
            ok = check(*items, v[i], ipath + "/" + std::to_string(i), spath + "/items", depth + 1) && ok;
          }
        } else if (items->is_array()) {
          for (std::size_t i = 0; i < v.size(); ++i) {
            std::string ip = ipath + "/" + std::to_string(i);
            if (i < items->size()) {
              ok = check((*items)[i], v[i], ip, spath + "/items/" + std::to_string(i), depth + 1) && ok;
              continue;
            }
            const Json* extra = kw("additionalItems");
            if (!extra) break;
            if (extra->is_boolean() && !extra->get<bool>()) {
              ok = fail(ip, spath + "/additionalItems", "additional items are not allowed");
            } else if (extra->is_object()) {
              ok = check(*extra, v[i], ip, spath + "/additionalItems", depth + 1) && ok;
            }
          }
        }
      }
      if (const Json* m = kw("maxItems"); m && m->is_number() && v.size() > m->get<double>()) {
        ok = fail(ipath, spath + "/maxItems", "array has too many items");
      }
      if (const Json* m = kw("minItems"); m && m->is_number() && v.size() < m->get<double>()) {
        ok = fail(ipath, spath + "/minItems", "array has too few items");
      }
      if (const Json* m = kw("uniqueItems"); m && m->is_boolean() && m->get<bool>()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          for (std::size_t j = i + 1; j < v.size(); ++j) {
            if (v[i] == v[j]) {
              ok = fail(ipath, spath + "/uniqueItems", "array items are not unique");
              i = v.size();
              break;
            }
          }
        }
      }
    }

    if (v.is_object()) {
      if (const Json* m = kw("maxProperties"); m && m->is_number() && v.size() > m->get<double>()) {
        ok = fail(ipath, spath + "/maxProperties", "object has too many properties");
      }
      if (const Json* m = kw("minProperties"); m && m->is_number() && v.size() < m->get<double>()) {
        ok = fail(ipath, spath + "/minProperties", "object has too few properties");
      }
      if (const Json* req = kw("required"); req && req->is_array()) {
        for (const auto& r : *req) {
          if (r.is_string() && !v.contains(r.get<std::string>())) {
            ok = fail(ipath, spath + "/required", "missing required property " + r.dump());
          }
        }
      }
      const Json* props = kw("properties");
      const Json* pats = kw("patternProperties");
      const Json* extra = kw("additionalProperties");
      for (auto it = v.begin(); it != v.end(); ++it) {
        const std::string& key = it.key();
        std::string ip = ipath + "/" + escape_pointer(key);
        bool matched = false;
        if (props && props->is_object()) {
          if (auto p = props->find(key); p != props->end()) {
            matched = true;
            ok = check(*p, *it, ip, spath + "/properties/" + escape_pointer(key), depth + 1) && ok;
          }
        }
        if (pats && pats->is_object()) {
          for (auto p = pats->begin(); p != pats->end(); ++p) {
            try {
              if (std::regex_search(key, std::regex(p.key(), std::regex::ECMAScript))) {
                matched = true;
                ok = check(*p, *it, ip, spath + "/patternProperties/" + escape_pointer(p.key()), depth + 1) && ok;
              }
            } catch (const std::regex_error&) {
            }
          }
        }
        if (matched || !extra) continue;
        if (extra->is_boolean() && !extra->get<bool>()) {
          ok = fail(ip, spath + "/additionalProperties", "additional property " + key + " is not allowed");
        } else if (extra->is_object()) {
          ok = check(*extra, *it, ip, spath + "/additionalProperties", depth + 1) && ok;
        }
      }
      if (const Json* deps = kw("dependencies"); deps && deps->is_object()) {
        for (auto d = deps->begin(); d != deps->end(); ++d) {
          if (!v.contains(d.key())) continue;
          std::string sp = spath + "/dependencies/" + escape_pointer(d.key());
          if (d->is_array()) {
            for (const auto& r : *d) {
              if (r.is_string() && !v.contains(r.get<std::string>())) {
                ok = fail(ipath, sp, d.key() + " requires " + r.dump());
              }
            }
          } else if (d->is_object()) {
            ok = check(*d, v, ipath, sp, depth + 1) && ok;
          }
        }
      }
    }

    if (const Json* all = kw("allOf"); all && all->is_array()) {
      for (std::size_t i = 0; i < all->size(); ++i) {
        ok = check((*all)[i], v, ipath, spath + "/allOf/" + std::to_string(i), depth + 1) && ok;
      }
    }
    if (const Json* any = kw("anyOf"); any && any->is_array()) {
      bool found = false;
      for (const auto& s : *any) {
        if (quiet(s, v, depth)) {
          found = true;
          break;
        }
      }
      if (!found) ok = fail(ipath, spath + "/anyOf", "no anyOf branch matches");
    }
    if (const Json* one = kw("oneOf"); one && one->is_array()) {
      int n = 0;
      for (const auto& s : *one) n += quiet(s, v, depth) ? 1 : 0;
      if (n != 1) ok = fail(ipath, spath + "/oneOf", std::to_string(n) + " oneOf branches match");
    }
    if (const Json* n = kw("not"); n && n->is_object()) {
      if (quiet(*n, v, depth)) ok = fail(ipath, spath + "/not", "instance matches a negated schema");
    }
    return ok;
  }

 private:
  bool quiet(const Json& schema, const Json& v, int depth) {
    Run sub(root_, nullptr);
    return sub.check(schema, v, "", "", depth + 1);
  }

  bool fail(const std::string& ipath, const std::string& spath, std::string msg) {
    if (errors_) errors_->push_back({ipath, spath, std::move(msg)});
    return false;
  }

  const Json* resolve(const std::string& ref) const {
    const Json* base = &root_;
    std::string frag;
    if (ref.rfind(kDraft04Uri, 0) == 0) {
      base = &draft04_metaschema();
      frag = ref.substr(std::string(kDraft04Uri).size());
    } else if (!ref.empty() && ref[0] == '#') {
      frag = ref.substr(1);
    } else {
      return nullptr;
    }
    const Json* cur = base;
    std::size_t i = 0;
    while (i < frag.size()) {
      if (frag[i] != '/') return nullptr;
      std::size_t j = frag.find('/', i + 1);
      std::string tok = unescape_pointer(frag.substr(i + 1, j == std::string::npos ? std::string::npos : j - i - 1));
      if (cur->is_object()) {
        auto it = cur->find(tok);
        if (it == cur->end()) return nullptr;
        cur = &*it;
      } else if (cur->is_array()) {
        std::size_t idx = 0;
        try {
          idx = std::stoul(tok);
        } catch (const std::exception&) {
          return nullptr;
        }
        if (idx >= cur->size()) return nullptr;
        cur = &(*cur)[idx];
      } else {
        return nullptr;
      }
      i = j == std::string::npos ? frag.size() : j;
    }
    return cur;
  }

  const Json& root_;
  std::vector<ValidationError>* errors_;
};

}  // namespace

bool is_json_integer(const Json& j) { return j.is_number_integer() || j.is_number_unsigned(); }

const Json& draft04_metaschema() {
  static const Json meta = Json::parse(embedded::kDraft04Metaschema);
  return meta;
}

SchemaValidator::SchemaValidator(Json schema) : root_(std::move(schema)) {}

std::vector<ValidationError> SchemaValidator::validate(const Json& instance) const {
  std::vector<ValidationError> errors;
  Run(root_, &errors).check(root_, instance, "", "");
  return errors;
}

bool SchemaValidator::is_valid(const Json& instance) const { return Run(root_, nullptr).check(root_, instance, "", ""); }

std::vector<ValidationError> check_metaschema(const Json& schema) {
  std::vector<ValidationError> errors;
  Run(draft04_metaschema(), &errors).check(draft04_metaschema(), schema, "", "");
  return errors;
}

bool validates(const Json& schema, const Json& instance) { return Run(schema, nullptr).check(schema, instance, "", ""); }

}  // namespace hpmine
