#include "adsamp/pipeline.hpp"

#include "adsamp/boundary.hpp"
#include "adsamp/io.hpp"
#include "adsamp/resampler.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

namespace adsamp {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "nan"; }

json json_num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class Fnv1a {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < n; ++k) {
            h_ ^= p[k];
            h_ *= 0x100000001B3ull;
        }
    }
    template <typename T>
    void value(const T& v) {
        bytes(&v, sizeof v);
    }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    std::uint64_t h_ = 0xCBF29CE484222325ull;
};

std::string safe_name(std::string name) {
    for (char& c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) c = '_';
    return name;
}

void validate_labels(const LabelMap& labels, const PipelineSetup& setup) {
    for (ClassId id : labels.labels()) {
        if (labels.is_ignored(id)) continue;
        const bool known = setup.class_names.empty() ? (id >= 0 && id < setup.num_classes)
                                                     : setup.class_names.count(id) > 0;
        if (!known) throw Error(ErrorCode::format, "label id " + std::to_string(id) + " is not in the class table");
    }
}

SamplingTensor solve_or_load(const LabelMap& labels, const PipelineSetup& setup, const PipelineConfig& config,
                             ArmResult& arm) {
    std::string cache_path;
    if (!config.tensor_cache_dir.empty()) {
        Fnv1a key;
        key.bytes(labels.labels().data(), labels.labels().size() * sizeof(ClassId));
        key.value(labels.height());
        key.value(labels.width());
        for (ClassId t : setup.targets.ids()) key.value(t);
        key.value(config.tensor_h);
        key.value(config.tensor_w);
        key.value(std::bit_cast<std::uint64_t>(config.lambda));
        cache_path = (fs::path(config.tensor_cache_dir) / (key.hex() + ".smpt")).string();
        if (fs::exists(cache_path)) return read_tensor_smpt(cache_path);
    }
    const BoundaryMap boundary = extract_boundary(labels, setup.targets);
    const NearestBoundaryField b = nearest_boundary_field(boundary, config.tensor_h, config.tensor_w);
    arm.solver_called = true;
    SamplingTensor phi = solve_sampling_tensor(b, EnergyParams{config.lambda}, {}, &arm.solve);
    if (!cache_path.empty()) {
        fs::create_directories(config.tensor_cache_dir);
        const std::string tmp = cache_path + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
        write_tensor_smpt(tmp, phi);
        fs::rename(tmp, cache_path);
    }
    return phi;
}

LabelMap run_arm(const LabelMap& labels, const std::optional<ImageBuffer>& image, const SamplingTensor& phi,
                 const PipelineSetup& setup, const PipelineConfig& config, std::mt19937_64& rng, ArmResult& arm,
                 std::optional<ImageBuffer>* downsampled) {
    if (image && downsampled) *downsampled = sample_image(*image, phi).values;
    const ScoreMap scores = oracle_classify(labels, phi, setup.num_classes, config.oracle, &rng);
    const RasterCoverage coverage = build_coverage(phi, labels.grid());
    arm.pixels_tested = coverage.diagnostics().pixels_tested;
    arm.fallback_pixels = coverage.diagnostics().fallback_pixels;
    arm.inverted_triangles = coverage.diagnostics().inverted_triangles;
    LabelMap pred = upsample_labels(scores, coverage, labels.ignore_id());
    arm.confusion.add(pred, labels);
    arm.iou = iou_report(arm.confusion, setup.targets);
    arm.trimap = trimap_counts(pred, labels, setup.targets, config.trimap_widths);
    arm.objects = collect_objects(pred, labels, setup.targets);
    return pred;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ImageResult process_image(const ImageSource& source, std::size_t index, const PipelineSetup& setup,
                          const PipelineConfig& config, const std::string& out_dir) {
    ImageResult result;
    result.name = source.name;
    try {
        auto [image, labels] = source.load();
        if (config.center_crop_square) {
            labels = center_crop_square(labels);
            if (image) image = center_crop_square(*image);
        }
        if (image && !(image->grid() == labels.grid())) {
            throw Error(ErrorCode::shape, "image and label map differ in size");
        }
        validate_labels(labels, setup);

        std::optional<ImageBuffer> down_adaptive, down_uniform;
        const bool save = config.save_outputs && !out_dir.empty();

        auto t0 = std::chrono::steady_clock::now();
        const SamplingTensor phi0 = solve_or_load(labels, setup, config, result.adaptive);
        const SamplingTensor phi = resize_tensor(phi0, config.res_h, config.res_w);
        std::mt19937_64 rng_adaptive(scene_seed(config.seed, static_cast<int>(index)));
        const LabelMap pred_adaptive =
            run_arm(labels, image, phi, setup, config, rng_adaptive, result.adaptive, save ? &down_adaptive : nullptr);
        result.adaptive.seconds = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const SamplingTensor phi_u = SamplingTensor::uniform(config.res_h, config.res_w);
        std::mt19937_64 rng_uniform(scene_seed(~config.seed, static_cast<int>(index)));
        const LabelMap pred_uniform =
            run_arm(labels, image, phi_u, setup, config, rng_uniform, result.uniform, save ? &down_uniform : nullptr);
        result.uniform.seconds = seconds_since(t0);

        if (save) {
            const fs::path dir = fs::path(out_dir) / "images";
            fs::create_directories(dir);
            const std::string stem = safe_name(source.name);
            write_label_png((dir / (stem + "_pred_adaptive.png")).string(), pred_adaptive);
            write_label_png((dir / (stem + "_pred_uniform.png")).string(), pred_uniform);
            write_tensor_smpt((dir / (stem + "_tensor.smpt")).string(), phi0);
            if (down_adaptive && down_adaptive->channels() <= 4) {
                write_image_png((dir / (stem + "_down_adaptive.png")).string(), *down_adaptive);
                write_image_png((dir / (stem + "_down_uniform.png")).string(), *down_uniform);
            }
        }
        result.ok = true;
    } catch (const ConvergenceError& e) {
        result.error = std::string("skipped, solver did not converge: ") + e.what();
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

void finish_arm(ArmReport& arm, std::vector<ObjectRecord>& objects, const PipelineSetup& setup, int bins) {
    arm.iou = iou_report(arm.confusion, setup.targets);
    arm.objects = bin_objects(objects, bins);
}

void accumulate(ArmReport& report, const ArmResult& arm, std::vector<ObjectRecord>& objects) {
    report.confusion.merge(arm.confusion);
    report.trimap.merge(arm.trimap);
    objects.insert(objects.end(), arm.objects.begin(), arm.objects.end());
    report.flops += arm.solve.flops;
    report.solver_iterations += arm.solve.iterations;
    report.pixels_tested += arm.pixels_tested;
    report.solver_calls += arm.solver_called ? 1 : 0;
}

json arm_summary(const ArmReport& arm) {
    json j;
    j["mean_target_iou"] = json_num(arm.iou.mean_target);
    j["mean_all_iou"] = json_num(arm.iou.mean_all);
    j["pixel_accuracy"] = json_num(arm.iou.pixel_accuracy);
    j["solver_calls"] = arm.solver_calls;
    j["solver_iterations"] = arm.solver_iterations;
    j["solver_flops"] = arm.flops;
    j["raster_pixels_tested"] = arm.pixels_tested;
    return j;
}

} // namespace

// ---------------------------------------------------------------- manifest

DatasetManifest DatasetManifest::load(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::format, path + ": " + e.what());
    }
    DatasetManifest m;
    try {
        const fs::path base = fs::path(path).parent_path();
        m.root = (base / j.value("root", std::string("."))).lexically_normal().string();
        for (const auto& item : j.at("items")) {
            DatasetItem d;
            d.image = item.value("image", std::string());
            d.labels = item.at("labels").get<std::string>();
            m.items.push_back(d);
        }
        for (const auto& [key, name] : j.at("classes").items()) {
            std::size_t used = 0;
            const int id = std::stoi(key, &used);
            if (used != key.size()) throw Error(ErrorCode::format, "class id '" + key + "' is not an integer");
            m.classes[id] = name.get<std::string>();
        }
        m.targets = j.at("targets").get<std::vector<ClassId>>();
        if (j.contains("ignore_id")) {
            if (j["ignore_id"].is_null()) m.ignore_id.reset();
            else m.ignore_id = j["ignore_id"].get<ClassId>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::format, path + ": " + e.what());
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::format, path + ": class ids must be integers");
    }
    if (m.classes.empty()) throw Error(ErrorCode::config, path + ": class table is empty");
    if (m.ignore_id && m.classes.count(*m.ignore_id)) {
        throw Error(ErrorCode::config, path + ": ignore id also appears in the class table");
    }
    for (ClassId t : m.targets)
        if (!m.classes.count(t)) throw Error(ErrorCode::config, path + ": target " + std::to_string(t) + " is not a class");
    return m;
}

std::string DatasetManifest::to_json() const {
    json j;
    j["root"] = root;
    j["items"] = json::array();
    for (const auto& item : items) {
        json e;
        if (!item.image.empty()) e["image"] = item.image;
        e["labels"] = item.labels;
        j["items"].push_back(e);
    }
    j["classes"] = json::object();
    for (const auto& [id, name] : classes) j["classes"][std::to_string(id)] = name;
    j["targets"] = targets;
    j["ignore_id"] = ignore_id ? json(*ignore_id) : json(nullptr);
    return j.dump(2) + "\n";
}

std::string DatasetManifest::resolve(const std::string& relative) const {
    const fs::path p(relative);
    return p.is_absolute() ? relative : (fs::path(root) / p).string();
}

int DatasetManifest::num_classes() const { return classes.empty() ? 0 : classes.rbegin()->first + 1; }

// ---------------------------------------------------------------- oracle

OracleConfig OracleConfig::parse(const std::string& text) {
    OracleConfig c;
    if (text == "gt" || text == "gt-at-sample") return c;
    const std::string prefix = "noisy:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string p = text.substr(prefix.size());
        double v = 0.0;
        const auto res = std::from_chars(p.data(), p.data() + p.size(), v);
        if (res.ec != std::errc() || res.ptr != p.data() + p.size() || !(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::config, "noisy oracle probability must be a number in [0, 1]");
        }
        c.mode = OracleMode::noisy;
        c.flip_probability = v;
        return c;
    }
    throw Error(ErrorCode::config, "oracle must be 'gt' or 'noisy:<p>', got '" + text + "'");
}

std::string OracleConfig::to_string() const {
    return mode == OracleMode::ground_truth ? "gt" : "noisy:" + num(flip_probability);
}

ScoreMap oracle_classify(const LabelMap& labels, const SamplingTensor& phi, int num_classes,
                         const OracleConfig& oracle, std::mt19937_64* rng) {
    if (num_classes <= labels.max_class()) throw Error(ErrorCode::config, "class count must exceed the largest label id");
    const bool noisy = oracle.mode == OracleMode::noisy && oracle.flip_probability > 0.0;
    if (noisy && !rng) throw Error(ErrorCode::config, "noisy oracle needs a random generator");
    const LabelMap sampled = sample_labels(labels, phi);
    ScoreMap scores(phi.grid_h(), phi.grid_w(), num_classes);
    for (int i = 0; i < phi.grid_h(); ++i)
        for (int j = 0; j < phi.grid_w(); ++j) {
            ClassId id = sampled.at(i, j);
            if (sampled.is_ignored(id)) {
                for (int k = 0; k < num_classes; ++k) scores.at(k, i, j) = 1.0 / num_classes;
                continue;
            }
            if (noisy && num_classes > 1) {
                const double u = static_cast<double>((*rng)() >> 11) * 0x1.0p-53;
                if (u < oracle.flip_probability) {
                    const auto other = static_cast<ClassId>((*rng)() % static_cast<std::uint64_t>(num_classes - 1));
                    id = other >= id ? other + 1 : other;
                }
            }
            scores.at(id, i, j) = 1.0;
        }
    return scores;
}

void PipelineConfig::validate() const {
    if (!(lambda >= 0.0)) throw Error(ErrorCode::config, "lambda must be non-negative");
    if (tensor_h < 2 || tensor_w < 2) throw Error(ErrorCode::size, "tensor size must be at least 2x2");
    if (res_h < 2 || res_w < 2) throw Error(ErrorCode::size, "downsample resolution must be at least 2x2");
    for (int w : trimap_widths)
        if (w < 1) throw Error(ErrorCode::config, "trimap widths must be positive");
    if (object_bins < 1) throw Error(ErrorCode::config, "object recall needs at least one bin");
    if (threads < 0) throw Error(ErrorCode::config, "thread count must be non-negative");
}

// ---------------------------------------------------------------- pipeline

PipelineReport run_pipeline(const std::vector<ImageSource>& sources, const PipelineSetup& setup,
                            const PipelineConfig& config, const std::string& out_dir) {
    config.validate();
    if (setup.num_classes < 1) throw Error(ErrorCode::config, "class count must be positive");

    PipelineReport report;
    report.images.resize(sources.size());
    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int threads = std::max(1, std::min<int>(config.threads > 0 ? config.threads : hw,
                                                  static_cast<int>(sources.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < sources.size(); k = next++) {
            report.images[k] = process_image(sources[k], k, setup, config, out_dir);
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<ObjectRecord> objects_adaptive, objects_uniform;
    report.adaptive.trimap.widths = config.trimap_widths;
    report.adaptive.trimap.correct.assign(config.trimap_widths.size(), 0);
    report.adaptive.trimap.total.assign(config.trimap_widths.size(), 0);
    report.uniform.trimap = report.adaptive.trimap;
    for (const ImageResult& r : report.images) {
        if (!r.ok) {
            ++report.failed;
            continue;
        }
        ++report.processed;
        accumulate(report.adaptive, r.adaptive, objects_adaptive);
        accumulate(report.uniform, r.uniform, objects_uniform);
        if (r.adaptive.iou.mean_target > r.uniform.iou.mean_target) ++report.adaptive_wins;
    }
    finish_arm(report.adaptive, objects_adaptive, setup, config.object_bins);
    finish_arm(report.uniform, objects_uniform, setup, config.object_bins);
    attach_relative(report.adaptive.objects, report.uniform.objects);
    return report;
}

PipelineReport run_pipeline(const DatasetManifest& manifest, const PipelineConfig& config, const std::string& out_dir) {
    std::vector<ImageSource> sources;
    for (std::size_t k = 0; k < manifest.items.size(); ++k) {
        const DatasetItem item = manifest.items[k];
        char prefix[16];
        std::snprintf(prefix, sizeof prefix, "%04zu_", k);
        ImageSource s;
        s.name = prefix + fs::path(item.labels).stem().string();
        s.load = [&manifest, item] {
            std::optional<ImageBuffer> image;
            if (!item.image.empty()) image = read_image_png(manifest.resolve(item.image));
            LabelMap labels = read_label_png(manifest.resolve(item.labels), manifest.ignore_id);
            return std::pair{std::move(image), std::move(labels)};
        };
        sources.push_back(std::move(s));
    }
    const PipelineSetup setup{TargetClassSet(manifest.targets, manifest.ignore_id), manifest.num_classes(),
                              manifest.classes};
    return run_pipeline(sources, setup, config, out_dir);
}

// ---------------------------------------------------------------- synthetic data

std::uint64_t scene_seed(std::uint64_t base_seed, int index) {
    return splitmix64(base_seed ^ splitmix64(static_cast<std::uint64_t>(index)));
}

std::vector<ImageSource> synthetic_sources(const SyntheticScene& base, int count) {
    if (count < 0) throw Error(ErrorCode::config, "scene count must be non-negative");
    std::vector<ImageSource> sources;
    for (int k = 0; k < count; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "scene_%04d", k);
        SyntheticScene spec = base;
        spec.seed = scene_seed(base.seed, k);
        sources.push_back({name, [spec] {
                               GeneratedScene scene = generate_scene(spec);
                               return std::pair{std::optional<ImageBuffer>(std::move(scene.image)),
                                                std::move(scene.labels)};
                           }});
    }
    return sources;
}

PipelineSetup synthetic_setup(const SyntheticScene& base) {
    std::vector<ClassId> targets;
    std::map<ClassId, std::string> names{{0, "background"}};
    for (int c = 1; c <= base.num_object_classes; ++c) {
        targets.push_back(c);
        names[c] = "object_" + std::to_string(c);
    }
    return {TargetClassSet(targets, kDefaultIgnoreId), base.num_object_classes + 1, names};
}

DatasetManifest write_scene_dataset(const SyntheticScene& base, int count, const std::string& out_dir) {
    const PipelineSetup setup = synthetic_setup(base);
    DatasetManifest m;
    m.root = ".";
    m.classes = setup.class_names;
    m.targets = setup.targets.ids();
    m.ignore_id = kDefaultIgnoreId;
    fs::create_directories(fs::path(out_dir) / "images");
    fs::create_directories(fs::path(out_dir) / "labels");
    const auto sources = synthetic_sources(base, count);
    for (const ImageSource& s : sources) {
        auto [image, labels] = s.load();
        const std::string image_rel = "images/" + s.name + ".png";
        const std::string label_rel = "labels/" + s.name + ".png";
        write_image_png((fs::path(out_dir) / image_rel).string(), *image);
        write_label_png((fs::path(out_dir) / label_rel).string(), labels);
        m.items.push_back({image_rel, label_rel});
    }
    write_text_file((fs::path(out_dir) / "manifest.json").string(), m.to_json());
    m.root = out_dir;
    return m;
}

// ---------------------------------------------------------------- reports

std::string iou_csv(const std::vector<std::pair<std::string, const ConfusionCounts*>>& arms,
                    const TargetClassSet& targets, const std::map<ClassId, std::string>& names) {
    std::ostringstream out;
    out << "arm,class_id,class_name,target,intersection,union,iou\n";
    for (const auto& [arm, counts] : arms) {
        for (ClassId id : counts->classes()) {
            const std::int64_t u = counts->union_count(id);
            const auto it = names.find(id);
            out << arm << ',' << id << ',' << (it == names.end() ? "" : it->second) << ','
                << (targets.contains(id) ? 1 : 0) << ',' << counts->intersection(id) << ',' << u << ','
                << (u ? num(static_cast<double>(counts->intersection(id)) / static_cast<double>(u)) : "nan") << '\n';
        }
    }
    return out.str();
}

std::string summary_csv(const std::vector<std::pair<std::string, const ConfusionCounts*>>& arms,
                        const TargetClassSet& targets) {
    std::ostringstream out;
    out << "arm,mean_target_iou,mean_all_iou,pixel_accuracy,pixels\n";
    for (const auto& [arm, counts] : arms) {
        const IoUReport r = iou_report(*counts, targets);
        out << arm << ',' << num(r.mean_target) << ',' << num(r.mean_all) << ',' << num(r.pixel_accuracy) << ','
            << counts->total() << '\n';
    }
    return out.str();
}

std::string trimap_csv(const std::vector<std::pair<std::string, const TrimapCounts*>>& arms) {
    std::ostringstream out;
    out << "arm,width,correct,total,accuracy\n";
    for (const auto& [arm, counts] : arms) {
        const TrimapCurve curve = trimap_curve(*counts);
        for (std::size_t k = 0; k < counts->widths.size(); ++k) {
            out << arm << ',' << counts->widths[k] << ',' << counts->correct[k] << ',' << counts->total[k] << ','
                << opt_num(curve.accuracy[k]) << '\n';
        }
    }
    return out.str();
}

std::string object_recall_csv(const std::vector<std::pair<std::string, const ObjectRecallReport*>>& arms) {
    std::ostringstream out;
    out << "arm,bin,objects,max_area,mean_recall,relative_recall\n";
    for (const auto& [arm, r] : arms) {
        for (int b = 0; b < r->bins; ++b) {
            out << arm << ',' << b << ',' << r->bin_counts[b] << ',' << r->bin_max_area[b] << ',' << num(r->per_bin[b])
                << ',' << (b < static_cast<int>(r->relative.size()) ? num(r->relative[b]) : "") << '\n';
        }
    }
    return out.str();
}

std::string per_image_csv(const PipelineReport& report, bool timing) {
    std::ostringstream out;
    out << "image,status,adaptive_target_iou,uniform_target_iou,adaptive_pixel_accuracy,uniform_pixel_accuracy,"
           "solver_iterations,solver_flops,adaptive_pixels_tested,uniform_pixels_tested,error";
    if (timing) out << ",adaptive_seconds,uniform_seconds";
    out << '\n';
    for (const ImageResult& r : report.images) {
        std::string error = r.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        out << r.name << ',' << (r.ok ? "ok" : "failed") << ',';
        if (r.ok) {
            out << num(r.adaptive.iou.mean_target) << ',' << num(r.uniform.iou.mean_target) << ','
                << num(r.adaptive.iou.pixel_accuracy) << ',' << num(r.uniform.iou.pixel_accuracy) << ','
                << r.adaptive.solve.iterations << ',' << num(r.adaptive.solve.flops) << ',' << r.adaptive.pixels_tested
                << ',' << r.uniform.pixels_tested << ',';
        } else {
            out << ",,,,,,,,";
        }
        out << error;
        if (timing) out << ',' << num(r.adaptive.seconds) << ',' << num(r.uniform.seconds);
        out << '\n';
    }
    return out.str();
}

void write_pipeline_reports(const PipelineReport& report, const PipelineSetup& setup, const PipelineConfig& config,
                            const std::string& out_dir, const std::vector<std::string>& inputs,
                            const std::string& source_description) {
    fs::create_directories(out_dir);
    const std::vector<std::pair<std::string, const ConfusionCounts*>> conf = {
        {"adaptive", &report.adaptive.confusion}, {"uniform", &report.uniform.confusion}};
    const std::vector<std::pair<std::string, std::string>> files = {
        {"iou.csv", iou_csv(conf, setup.targets, setup.class_names)},
        {"summary.csv", summary_csv(conf, setup.targets)},
        {"trimap.csv", trimap_csv({{"adaptive", &report.adaptive.trimap}, {"uniform", &report.uniform.trimap}})},
        {"object_recall.csv",
         object_recall_csv({{"adaptive", &report.adaptive.objects}, {"uniform", &report.uniform.objects}})},
        {"per_image.csv", per_image_csv(report, config.timing)},
    };
    json j;
    j["source"] = source_description;
    json c;
    c["lambda"] = json_num(config.lambda);
    c["tensor_size"] = {config.tensor_h, config.tensor_w};
    c["resolution"] = {config.res_h, config.res_w};
    c["trimap_widths"] = config.trimap_widths;
    c["object_bins"] = config.object_bins;
    c["oracle"] = config.oracle.to_string();
    c["seed"] = config.seed;
    c["center_crop_square"] = config.center_crop_square;
    j["config"] = c;
    j["targets"] = setup.targets.ids();
    j["num_classes"] = setup.num_classes;
    json s;
    s["images"] = report.images.size();
    s["processed"] = report.processed;
    s["failed"] = report.failed;
    s["adaptive_wins"] = report.adaptive_wins;
    s["adaptive"] = arm_summary(report.adaptive);
    s["uniform"] = arm_summary(report.uniform);
    j["summary"] = s;
    j["failures"] = json::array();
    for (const ImageResult& r : report.images)
        if (!r.ok) j["failures"].push_back({{"image", r.name}, {"error", r.error}});
    if (!report.adaptive.objects.warnings.empty()) j["warnings"] = report.adaptive.objects.warnings;
    json hashes = json::object();
    for (const auto& [name, contents] : files) {
        const std::string path = (fs::path(out_dir) / name).string();
        write_text_file(path, contents);
        hashes[name] = sha256_file(path);
    }
    j["files"] = hashes;
    json input_hashes = json::object();
    for (const std::string& path : inputs) input_hashes[path] = fs::exists(path) ? json(sha256_file(path)) : json(nullptr);
    j["inputs"] = input_hashes;
    write_text_file((fs::path(out_dir) / "run.json").string(), j.dump(2) + "\n");
}

} // namespace adsamp
