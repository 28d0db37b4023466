#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "trajmine/config.hpp"
#include "trajmine/geom.hpp"
#include "trajmine/ims.hpp"
#include "trajmine/monitor.hpp"
#include "trajmine/pca_routes.hpp"
#include "trajmine/synthetic.hpp"
#include "trajmine/trajdata.hpp"
#include "trajmine/waypoint_routes.hpp"

namespace py = pybind11;
using namespace trajmine;

namespace {

std::vector<Trajectory> load_tracks(const std::string& tracks_csv,
                                    const std::string& metadata_jsonl) {
    std::ifstream tracks(tracks_csv, std::ios::binary);
    if (!tracks) throw std::runtime_error("cannot open file: " + tracks_csv);
    std::ifstream meta(metadata_jsonl, std::ios::binary);
    if (!meta) throw std::runtime_error("cannot open file: " + metadata_jsonl);
    return parse_tracks(tracks, meta);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Trajectory clustering, conformance monitoring, and complexity metrics";

    py::class_<TrackPoint>(m, "TrackPoint")
        .def(py::init<>())
        .def_readwrite("t", &TrackPoint::t)
        .def_readwrite("x", &TrackPoint::x)
        .def_readwrite("y", &TrackPoint::y)
        .def_readwrite("z", &TrackPoint::z)
        .def("__repr__", [](const TrackPoint& p) {
            std::ostringstream s;
            s << "TrackPoint(t=" << p.t << ", x=" << p.x << ", y=" << p.y << ", z=" << p.z << ")";
            return s.str();
        });

    py::class_<FlightMetadata>(m, "FlightMetadata")
        .def(py::init<>())
        .def_readwrite("flight_id", &FlightMetadata::flight_id)
        .def_readwrite("origin", &FlightMetadata::origin)
        .def_readwrite("destination", &FlightMetadata::destination)
        .def_readwrite("category", &FlightMetadata::category)
        .def_readwrite("start_time", &FlightMetadata::start_time)
        .def_readwrite("n_points", &FlightMetadata::n_points);

    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init<>())
        .def_readwrite("meta", &Trajectory::meta)
        .def_readwrite("points", &Trajectory::points)
        .def("__len__", [](const Trajectory& t) { return t.points.size(); });

    py::class_<ResampledTrajectory>(m, "ResampledTrajectory")
        .def_readonly("meta", &ResampledTrajectory::meta)
        .def_readonly("points", &ResampledTrajectory::points)
        .def_readonly("headings", &ResampledTrajectory::headings)
        .def("__len__", [](const ResampledTrajectory& t) { return t.points.size(); });

    py::class_<TurningPoint>(m, "TurningPoint")
        .def_readonly("position", &TurningPoint::position)
        .def_readonly("flight_id", &TurningPoint::flight_id)
        .def_readonly("index", &TurningPoint::index);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("airport", &RunConfig::airport)
        .def_readwrite("alpha", &RunConfig::alpha)
        .def_readwrite("psi_c", &RunConfig::psi_c)
        .def_readwrite("resample_n", &RunConfig::resample_n)
        .def_readwrite("seed", &RunConfig::seed)
        .def("fingerprint", [](const RunConfig& c) { return run_config_fingerprint(c); });

    m.def("load_run_config", &load_run_config_file, py::arg("path"),
          "Parse a run configuration INI file");
    m.def("load_tracks", &load_tracks, py::arg("tracks_csv"), py::arg("metadata_jsonl"),
          "Parse a track CSV and metadata JSONL pair into trajectories");
    m.def(
        "filter_flights",
        [](const std::vector<Trajectory>& flights, const std::string& dest,
           const std::string& op, std::size_t min_points) {
            return filter_flights(flights, dest, op_type_from_string(op), min_points);
        },
        py::arg("flights"), py::arg("destination"), py::arg("op_type"), py::arg("min_points"),
        "IFR flights for one destination and operation with enough track points");
    m.def(
        "resample",
        [](const Trajectory& t, std::size_t n, double alpha) { return resample(t, n, alpha); },
        py::arg("trajectory"), py::arg("n") = 50, py::arg("alpha") = 0.4,
        "Index-resample a trajectory to n points with filtered headings");
    m.def(
        "detect_turning_points",
        [](const Trajectory& t, double alpha, double psi_c) {
            return detect_turning_points(t, TurningConfig{alpha, psi_c});
        },
        py::arg("trajectory"), py::arg("alpha") = 0.4, py::arg("psi_c") = 0.025,
        "Heading-change turning points of one flight");
    m.def(
        "generate_corpus",
        [](const std::string& ini_text, std::uint64_t seed) {
            return generate_synthetic(parse_corpus_spec(ini_text), seed).flights;
        },
        py::arg("ini_text"), py::arg("seed"),
        "Generate a synthetic corpus from an INI description");

    py::class_<RouteModel>(m, "RouteModel")
        .def_readonly("flight_ids", &RouteModel::flight_ids)
        .def_readonly("cluster_labels", &RouteModel::cluster_labels)
        .def_readonly("n_clusters", &RouteModel::n_clusters)
        .def("to_json",
             [](const RouteModel& mdl) { return route_model_to_json(mdl, 1, "0000000000000000"); })
        .def_static("from_json", &route_model_from_json, py::arg("text"));

    m.def(
        "fit_route_model",
        [](const std::vector<ResampledTrajectory>& rts, double eps, std::size_t min_pts,
           std::size_t p) {
            return fit_route_model(rts, DbscanParams{eps, min_pts}, p);
        },
        py::arg("resampled"), py::arg("eps") = 0.0, py::arg("min_pts") = 5,
        py::arg("components") = 5,
        "Cluster resampled trajectories in principal-component space");

    py::class_<ImsKnowledgeBase>(m, "ImsKnowledgeBase")
        .def_readonly("trained_fragments", &ImsKnowledgeBase::trained_fragments)
        .def("n_boxes", [](const ImsKnowledgeBase& kb) { return kb.clusters.size(); })
        .def("to_json",
             [](const ImsKnowledgeBase& kb) { return ims_kb_to_json(kb, 1, "0000000000000000"); })
        .def_static("from_json", &ims_kb_from_json, py::arg("text"));

    m.def(
        "train_ims",
        [](const RouteModel& model, const std::vector<Trajectory>& flights, std::size_t initial_k,
           double merge_eps, double alpha, std::uint64_t seed) {
            std::map<std::string, int> label_of;
            for (std::size_t i = 0; i < model.flight_ids.size(); ++i)
                label_of[model.flight_ids[i]] = model.cluster_labels[i];
            std::vector<Fragment> fragments;
            for (const auto& f : flights) {
                auto it = label_of.find(f.meta.flight_id);
                if (it == label_of.end() || it->second == kOutlier) continue;
                const auto rt = resample(f, kFragmentPoints * kFragmentsPerFlight, alpha);
                const auto fr = fragment_trajectory(rt, model.norm);
                fragments.insert(fragments.end(), fr.begin(), fr.end());
            }
            if (fragments.empty()) throw std::runtime_error("no nominal flights to train on");
            const std::size_t k =
                initial_k > 0 ? std::min(initial_k, fragments.size()) : default_ims_k(fragments.size());
            return train_ims(fragments, k, merge_eps, model.norm, seed);
        },
        py::arg("model"), py::arg("flights"), py::arg("initial_k") = 0,
        py::arg("merge_eps") = 0.01, py::arg("alpha") = 0.4, py::arg("seed") = 0,
        "Train the conformance knowledge base on the model's nominal flights");

    py::class_<ComplexityReading>(m, "ComplexityReading")
        .def_readonly("t", &ComplexityReading::t)
        .def_readonly("i_sfo", &ComplexityReading::i_sfo)
        .def_readonly("i_not_sfo", &ComplexityReading::i_not_sfo)
        .def_readonly("c", &ComplexityReading::c);

    m.def(
        "run_replay",
        [](const std::vector<Trajectory>& flights, const ImsKnowledgeBase& kb,
           const std::string& airport, double tau) {
            MonitorConfig cfg;
            cfg.monitored_airport = airport;
            cfg.tau = tau;
            std::vector<ComplexityReading> readings;
            for (const auto& [snap, reading] : run_replay(flights, kb, cfg).ticks)
                readings.push_back(reading);
            return readings;
        },
        py::arg("flights"), py::arg("kb"), py::arg("airport") = "SFO", py::arg("tau") = 0.02,
        "Replay flights against a knowledge base; complexity per tick");

    m.def("group_entropy", &group_entropy, py::arg("n_group"), py::arg("n_ok"),
          "Base-2 entropy of a conforming/outlier split");
}
