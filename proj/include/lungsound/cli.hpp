#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lungsound/cache.hpp"
#include "lungsound/config.hpp"
#include "lungsound/eval.hpp"
#include "lungsound/pipeline.hpp"
#include "lungsound/synth.hpp"

namespace lungsound::cli {

// Exit codes: 0 success, 1 usage (handled by the flag parser), 2 data error,
// 3 broken internal invariant.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

namespace detail {

template <typename Fn>
int guard(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const data_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::logic_error& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

inline void print_summary_table(const dataset::DatasetSummary& s, std::ostream& out) {
    out << "Class       Cycles\n";
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        const auto c = eval::kReportAxis[i];
        out << std::left << std::setw(12) << class_name(c) << s.count(c) << "\n";
    }
    out << std::left << std::setw(12) << "Total" << s.total << "\n";
}

// Samples for training/CV: from the feature cache when it has entries,
// otherwise from the audio in data_dir (populating the cache when one is
// configured).
inline std::vector<eval::Sample> gather_samples(const PipelineConfig& cfg,
                                                const model::FeatureExtractor& fx,
                                                std::ostream& out) {
    std::vector<pipeline::CycleRecord> records;
    std::vector<imaging::FeatureImage> images;

    const auto cached = cfg.cache_dir.empty() ? std::vector<std::string>{}
                                              : cache::list_entries(cfg.cache_dir);
    if (!cached.empty()) {
        out << "loading " << cached.size() << " cached feature tensors from " << cfg.cache_dir
            << "\n";
        records.reserve(cached.size());
        images.reserve(cached.size());
        for (const auto& path : cached) {
            auto entry = cache::read_entry(path);
            pipeline::CycleRecord rec;
            rec.identity = entry.identity;
            const auto hash = entry.identity.find('#');
            const std::string stem =
                hash == std::string::npos ? entry.identity : entry.identity.substr(0, hash);
            rec.cycle.patient_id = dataset::parse_recording_filename(stem).patient_id;
            rec.cycle.label = entry.label;
            images.push_back(cache::image_from_entry(entry));
            records.push_back(std::move(rec));
        }
    } else {
        if (cfg.data_dir.empty())
            throw data_error("no feature cache and no data_dir configured");
        auto loaded = pipeline::load_directory(cfg.data_dir);
        if (!loaded.errors.empty()) {
            std::string msg = "unusable files in " + cfg.data_dir + ":";
            for (const auto& e : loaded.errors) msg += "\n  " + e;
            throw data_error(msg);
        }
        if (loaded.records.empty()) throw data_error(cfg.data_dir + ": no cycles found");
        records = std::move(loaded.records);
        out << "featurizing " << records.size() << " cycles from " << cfg.data_dir << "\n";
        images = pipeline::build_images(records, cfg);
        if (!cfg.cache_dir.empty()) {
            std::size_t written = 0;
            for (std::size_t i = 0; i < records.size(); ++i)
                if (cache::write_entry(cfg.cache_dir,
                                       cache::entry_from_image(records[i].identity,
                                                               records[i].cycle.label, images[i])))
                    ++written;
            out << "cached " << written << " feature tensors in " << cfg.cache_dir << "\n";
        }
    }

    out << "extracting features (" << images.size() << " images)\n";
    auto features = pipeline::extract_all_features(images, fx, cfg.threads);
    return pipeline::samples_from_features(records, std::move(features));
}

}  // namespace detail

inline int cmd_summarize(const PipelineConfig& cfg, std::ostream& out = std::cout,
                         std::ostream& err = std::cerr) {
    return detail::guard(err, [&]() {
        if (cfg.data_dir.empty()) throw data_error("summarize: data_dir is required");
        const auto loaded = pipeline::load_directory(cfg.data_dir);
        std::vector<LabeledCycle> cycles;
        cycles.reserve(loaded.records.size());
        for (const auto& r : loaded.records) cycles.push_back(r.cycle);
        detail::print_summary_table(dataset::dataset_summary(cycles), out);
        if (!loaded.errors.empty()) {
            err << "unusable files:\n";
            for (const auto& e : loaded.errors) err << "  " << e << "\n";
            return kExitData;
        }
        return kExitOk;
    });
}

inline int cmd_featurize(const PipelineConfig& cfg, std::ostream& out = std::cout,
                         std::ostream& err = std::cerr) {
    return detail::guard(err, [&]() {
        cfg.validate();
        if (cfg.data_dir.empty() || cfg.cache_dir.empty())
            throw data_error("featurize: data_dir and cache_dir are required");
        auto loaded = pipeline::load_directory(cfg.data_dir);
        if (!loaded.errors.empty()) {
            err << "unusable files:\n";
            for (const auto& e : loaded.errors) err << "  " << e << "\n";
            return kExitData;
        }
        const auto images = pipeline::build_images(loaded.records, cfg);
        std::size_t written = 0;
        for (std::size_t i = 0; i < loaded.records.size(); ++i) {
            const auto& rec = loaded.records[i];
            if (cache::write_entry(cfg.cache_dir, cache::entry_from_image(
                                                      rec.identity, rec.cycle.label, images[i])))
                ++written;
        }
        out << loaded.records.size() << " cycles, " << written << " cache entries written, "
            << loaded.records.size() - written << " already up to date\n";
        return kExitOk;
    });
}

inline int cmd_cv(const PipelineConfig& cfg, std::ostream& out = std::cout,
                  std::ostream& err = std::cerr) {
    return detail::guard(err, [&]() {
        cfg.validate();
        const auto fx = pipeline::build_extractor(cfg);
        const auto samples = detail::gather_samples(cfg, fx, out);
        out << "running " << cfg.k << "-fold cross-validation on " << samples.size()
            << " cycles\n";
        const auto report = eval::cross_validate(samples, cfg.k, cfg.train_config(), cfg.seed);

        auto j = eval::to_json(report);
        j["config"] = pipeline::config_to_json(cfg);
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out_dir);
        const auto json_path = fs::path(cfg.out_dir) / "report.json";
        const auto text_path = fs::path(cfg.out_dir) / "report.txt";
        {
            std::ofstream jf(json_path, std::ios::trunc);
            if (!jf) throw io_error("cannot write " + json_path.string());
            jf << j.dump(2) << "\n";
        }
        const std::string text = eval::to_text(report);
        {
            std::ofstream tf(text_path, std::ios::trunc);
            if (!tf) throw io_error("cannot write " + text_path.string());
            tf << text;
        }
        out << text;
        out << "wrote " << json_path.string() << " and " << text_path.string() << "\n";
        return kExitOk;
    });
}

inline int cmd_train(const PipelineConfig& cfg, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
    return detail::guard(err, [&]() {
        cfg.validate();
        const auto fx = pipeline::build_extractor(cfg);
        const auto samples = detail::gather_samples(cfg, fx, out);
        std::vector<std::vector<double>> xs;
        std::vector<ClassLabel> ys;
        xs.reserve(samples.size());
        for (const auto& s : samples) {
            xs.push_back(s.features);
            ys.push_back(s.label);
        }
        out << "training softmax head on " << xs.size() << " cycles\n";
        const auto trained = model::train_head(xs, ys, cfg.train_config());
        for (std::size_t e = 0; e < trained.epoch_mean_loss.size(); ++e)
            out << "epoch " << e << ": mean loss " << trained.epoch_mean_loss[e] << "\n";
        model::save_bundle(cfg.model_path, {fx, trained.head});
        out << "wrote " << cfg.model_path << "\n";
        return kExitOk;
    });
}

inline int cmd_predict(const PipelineConfig& cfg, const std::vector<std::string>& inputs,
                       std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guard(err, [&]() {
        cfg.validate();
        const auto plan = model::channel_plan(cfg.channel_widths());
        const auto bundle = model::load_bundle(cfg.model_path, plan);

        std::vector<std::string> wav_paths = inputs;
        if (wav_paths.empty()) {
            if (cfg.data_dir.empty())
                throw data_error("predict: give WAV paths or configure data_dir");
            namespace fs = std::filesystem;
            if (!fs::is_directory(cfg.data_dir))
                throw data_error(cfg.data_dir + ": not a directory");
            for (const auto& de : fs::directory_iterator(cfg.data_dir))
                if (de.is_regular_file() && de.path().extension() == ".wav")
                    wav_paths.push_back(de.path().string());
            std::sort(wav_paths.begin(), wav_paths.end());
            if (wav_paths.empty()) throw data_error(cfg.data_dir + ": no WAV files");
        }

        const auto ic = pipeline::image_config(cfg);
        for (const auto& path : wav_paths) {
            namespace fs = std::filesystem;
            const std::string stem = fs::path(path).stem().string();
            const auto clip = wav::read_file(path);
            std::vector<LabeledCycle> cycles;
            fs::path ann_path = fs::path(path);
            ann_path.replace_extension(".txt");
            if (fs::exists(ann_path)) {
                const auto meta = dataset::parse_recording_filename(stem);
                std::ifstream ann(ann_path);
                if (!ann) throw io_error("cannot open " + ann_path.string());
                cycles = dataset::extract_cycles(clip, meta, dataset::parse_annotation_file(ann));
            } else {
                // No annotations: score the whole clip as one cycle.
                LabeledCycle whole;
                whole.clip = clip;
                cycles.push_back(std::move(whole));
            }
            for (std::size_t i = 0; i < cycles.size(); ++i) {
                const auto img = pipeline::featurize_to_image(cycles[i], cfg, ic);
                const auto pred = model::predict(img, bundle.extractor, bundle.head);
                out << stem << "#" << i << " " << class_name(pred.label);
                out << " [";
                for (std::size_t k = 0; k < kNumClasses; ++k)
                    out << (k ? " " : "") << class_name(static_cast<ClassLabel>(k)) << "="
                        << pred.probabilities[k];
                out << "]\n";
            }
        }
        return kExitOk;
    });
}

inline int cmd_synth(const PipelineConfig& cfg, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
    return detail::guard(err, [&]() {
        const auto corpus = synth::generate_corpus(cfg.synth_config());
        const auto stems = synth::write_corpus_files(corpus, cfg.out_dir);
        out << "wrote " << stems.size() << " recordings (" << corpus.size() << " cycles) to "
            << cfg.out_dir << "\n";
        return kExitOk;
    });
}

// Re-renders a previously written report.json as the plain-text table.
inline int cmd_report(const PipelineConfig& cfg, const std::string& report_path,
                      std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guard(err, [&]() {
        const std::string path =
            report_path.empty()
                ? (std::filesystem::path(cfg.out_dir) / "report.json").string()
                : report_path;
        std::ifstream in(path);
        if (!in) throw io_error("cannot open " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(path + ": " + e.what());
        }
        eval::ConfusionMatrix cm;
        const auto& jcm = j.at("confusion_matrix");
        for (std::size_t r = 0; r < kNumClasses; ++r)
            for (std::size_t c = 0; c < kNumClasses; ++c)
                cm.counts[r][c] = jcm.at(r).at(c).get<std::uint64_t>();
        auto report = eval::report_from_matrix(cm);
        report.k = j.value("k", 0);
        if (j.contains("folds")) {
            for (const auto& f : j["folds"]) {
                eval::FoldResult fr;
                fr.fold = f.value("fold", 0);
                fr.n_train = f.value("n_train", std::size_t{0});
                fr.n_test = f.value("n_test", std::size_t{0});
                fr.accuracy = f.value("accuracy", 0.0);
                fr.final_train_loss = f.value("final_train_loss", 0.0);
                report.folds.push_back(fr);
            }
            if (!report.folds.empty()) {
                double sum = 0.0;
                for (const auto& f : report.folds) sum += f.accuracy;
                report.fold_mean_accuracy = sum / static_cast<double>(report.folds.size());
            }
        }
        out << eval::to_text(report);
        return kExitOk;
    });
}

}  // namespace lungsound::cli
