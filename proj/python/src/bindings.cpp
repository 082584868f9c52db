// Python bindings. Structured values cross the boundary as JSON text; the package wraps them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>

#include "dschat/dataset/table.hpp"
#include "dschat/dialogue/event_log.hpp"
#include "dschat/dialogue/manager.hpp"
#include "dschat/dialogue/state.hpp"
#include "dschat/engineering/training.hpp"
#include "dschat/errors.hpp"
#include "dschat/gateway/json_extract.hpp"
#include "dschat/petel/petel.hpp"
#include "dschat/results/results.hpp"
#include "dschat/service/config.hpp"

namespace py = pybind11;
using namespace dschat;

namespace {

dialogue::DialogueState state_arg(const std::string& name) {
  auto s = dialogue::normalize_state(name);
  if (!s) throw ValidationError("UnknownState", "unknown dialogue state " + name);
  return *s;
}

std::string replay_json(const std::string& path) {
  const auto r = dialogue::replay_log(path);
  Json traj = Json::array();
  for (auto st : r.trajectory) traj.push_back(dialogue::to_string(st));
  return Json{{"session", dialogue::session_record(r.session)},
              {"trajectory", traj},
              {"committed_turns", r.committed_turns},
              {"failed_turns", r.failed_turns},
              {"truncated", r.truncated},
              {"violations", r.violations},
              {"ok", r.ok()}}
      .dump();
}

std::string run_petel_json(const std::string& petel_text, const std::string& csv, const std::string& backend_spec,
                           std::uint64_t seed) {
  const auto p = petel::parse_petel(petel_text);
  const auto data = dataset::load_table(csv, "dataset");
  const auto filtered = engineering::apply_filters(data, p.filters());
  const auto matrix =
      engineering::prep_data(filtered, engineering::petel_to_attributes(p, filtered), p.problem_type());
  const auto request = engineering::build_train_request(p, matrix, seed);
  auto backend = engineering::make_backend(backend_spec);
  const auto summary = results::summarize_results(engineering::dispatch(request, *backend), p);
  return Json{{"request_id", request.request_id},
              {"rows", matrix.x.size()},
              {"rows_before_filters", data.rows.size()},
              {"results", summary.to_json()},
              {"report", results::render_template(summary)}}
      .dump();
}

// Owns a session manager built from a service config; the data directory defaults to memory only.
class Assistant {
 public:
  explicit Assistant(const std::string& config_json) {
    service::ServiceConfig base;
    base.data_dir.clear();
    const auto cfg = service::ServiceConfig::from_json(Json::parse(config_json), base);
    manager_ = std::make_unique<dialogue::SessionManager>(service::make_engine(cfg),
                                                         dialogue::ManagerOptions{cfg.data_dir, cfg.seed});
  }

  std::string create() { return manager_->create(); }
  std::string upload(const std::string& id, const std::string& csv, const std::string& name) {
    return manager_->upload(id, csv, name).to_json().dump();
  }
  std::string post(const std::string& id, const std::string& text) {
    return manager_->post_message(id, text).to_json().dump();
  }
  std::string session(const std::string& id) const { return dialogue::session_record(manager_->get(id)).dump(); }
  std::string snapshot(const std::string& id) const { return manager_->get(id).snapshot().dump(); }
  std::string results(const std::string& id) const { return manager_->results(id).to_json().dump(); }
  std::vector<std::string> ids() const { return manager_->ids(); }
  std::string log_path(const std::string& id) const { return manager_->log_path(id).string(); }
  std::string restore(const std::string& log) { return manager_->restore(log); }

 private:
  std::unique_ptr<dialogue::SessionManager> manager_;
};

// Owned by the module for the life of the interpreter.
PyObject* g_error = nullptr;

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::upstream: return "upstream";
    case ErrorCategory::not_found: return "not_found";
    case ErrorCategory::conflict: return "conflict";
  }
  return "validation";
}

}  // namespace

PYBIND11_MODULE(_native, m) {
  m.doc() = "dschat engine bindings";

  g_error = PyErr_NewException("dschat._native.DschatError", PyExc_RuntimeError, nullptr);
  m.add_object("DschatError", py::handle(g_error));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(g_error)(e.what());
      exc.attr("code") = e.code();
      exc.attr("category") = category_name(e.category());
      PyErr_SetObject(g_error, exc.ptr());
    } catch (const Json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("extract_json", [](const std::string& text) { return gateway::extract_json(text).dump(); }, py::arg("text"));
  m.def("parse_petel", [](const std::string& text) { return petel::parse_petel(text).to_json().dump(); },
        py::arg("text"));
  m.def("serialize_petel", [](const std::string& text) { return petel::serialize_petel(petel::parse_petel(text)); },
        py::arg("text"));
  m.def("petel_progress",
        [](const std::string& text) {
          const auto pr = petel::progress(petel::parse_petel(text));
          return Json{{"filled", pr.filled}, {"missing", pr.missing}}.dump();
        },
        py::arg("text"));

  m.def("states", [] {
    std::vector<std::string> out;
    for (auto s : dialogue::kAllStates) out.emplace_back(dialogue::to_string(s));
    return out;
  });
  m.def("normalize_state",
        [](const std::string& name) -> std::optional<std::string> {
          auto s = dialogue::normalize_state(name);
          if (!s) return std::nullopt;
          return std::string(dialogue::to_string(*s));
        },
        py::arg("name"));
  m.def("allowed_next",
        [](const std::string& state) {
          std::vector<std::string> out;
          for (auto s : dialogue::allowed_next(state_arg(state))) out.emplace_back(dialogue::to_string(s));
          return out;
        },
        py::arg("state"));

  m.def("replay", &replay_json, py::arg("log"), py::call_guard<py::gil_scoped_release>());
  m.def("run_petel", &run_petel_json, py::arg("petel"), py::arg("csv"), py::arg("backend") = "builtin",
        py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());

  using release = py::call_guard<py::gil_scoped_release>;
  py::class_<Assistant>(m, "Assistant")
      .def(py::init<const std::string&>(), py::arg("config"))
      .def("create", &Assistant::create, release())
      .def("upload", &Assistant::upload, py::arg("session_id"), py::arg("csv"), py::arg("name"), release())
      .def("post", &Assistant::post, py::arg("session_id"), py::arg("text"), release())
      .def("session", &Assistant::session, py::arg("session_id"), release())
      .def("snapshot", &Assistant::snapshot, py::arg("session_id"), release())
      .def("results", &Assistant::results, py::arg("session_id"), release())
      .def("ids", &Assistant::ids, release())
      .def("log_path", &Assistant::log_path, py::arg("session_id"))
      .def("restore", &Assistant::restore, py::arg("log"), release());
}
