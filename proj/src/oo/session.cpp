#include "rxo/oo/session.hpp"

#include "rxo/oo/translator.hpp"
#include "rxo/prs/persistence.hpp"

namespace rxo::oo {

Session::Session(prs::Database db, prs::MachineOptions opts) {
  if (!db.catalog_payload.empty()) catalog_ = Catalog::deserialize(db.catalog_payload);
  machine_ = prs::Machine(std::move(db), opts);
}

void Session::run(const std::vector<prs::Command>& cmds, const Catalog* next, std::vector<Relation>* out) {
  auto result = machine_.execute(cmds);
  if (out) out->insert(out->end(), result.outputs.begin(), result.outputs.end());
  if (next) {
    catalog_ = *next;
    machine_.set_catalog_payload(catalog_.serialize());
  }
}

std::vector<Relation> Session::execute(const Command& c) {
  std::vector<Relation> out;
  if (const auto* cc = std::get_if<ClassCreate>(&c)) {
    Catalog next = catalog_;
    next.define_class(*cc);
    run(Translator(next, database()).class_create(cc->name), &next, &out);
  } else if (const auto* r = std::get_if<Realize>(&c)) {
    Catalog next = catalog_;
    for (const auto& m : r->members) next.register_implementation(r->class_name, m, r->body, r->params);
    try {
      run(Translator(next, database()).realize(*r), &next, &out);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CyclicDefinition) fail(ErrorCode::CyclicBinding, e.detail());
      throw;
    }
  } else {
    run(Translator(catalog_, database()).translate(c), nullptr, &out);
  }
  return out;
}

std::vector<Relation> Session::execute_text(std::string_view script) {
  std::vector<Relation> out;
  for (const auto& pc : parse_script(script)) {
    auto r = execute(pc.command);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

void Session::save(const std::filesystem::path& dir) const { prs::save_database(database(), dir); }

Session Session::load(const std::filesystem::path& dir, prs::MachineOptions opts) {
  return Session(prs::load_database(dir), opts);
}

} // namespace rxo::oo
