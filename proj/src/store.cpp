#include "digest/store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "digest/errors.hpp"

namespace digest::store {

namespace fs = std::filesystem;

namespace {

std::string month_filename(const DateWindow& window) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d_%02d.jsonl", window.start.year, window.start.month);
    return buf;
}

void sort_canonical(std::vector<CorpusEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const CorpusEntry& a, const CorpusEntry& b) {
        if (a.record.publication_date != b.record.publication_date) {
            return a.record.publication_date < b.record.publication_date;
        }
        return a.record.id < b.record.id;
    });
}

std::vector<CorpusEntry> read_jsonl_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot open " + path.string());
    std::vector<CorpusEntry> entries;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto obj = nlohmann::ordered_json::parse(line, nullptr, false);
        if (obj.is_discarded()) {
            throw StorageError("corrupt corpus line " + std::to_string(line_no) + " in " +
                               path.string());
        }
        entries.push_back(entry_from_json(obj));
    }
    return entries;
}

}  // namespace

nlohmann::ordered_json entry_to_json(const CorpusEntry& entry) {
    const auto& r = entry.record;
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    if (r.doi) {
        obj["doi"] = *r.doi;
    } else {
        obj["doi"] = nullptr;
    }
    obj["title"] = r.title;
    obj["publication_date"] = r.publication_date.to_string();
    obj["abstract_text"] = r.abstract_text;
    obj["concepts"] = r.concepts;
    obj["fetched_at"] = r.fetched_at;
    obj["ingested_at"] = entry.ingested_at;
    obj["window_start"] = entry.source_window.start.to_string();
    obj["window_end"] = entry.source_window.end.to_string();
    return obj;
}

CorpusEntry entry_from_json(const nlohmann::ordered_json& obj) {
    try {
        CorpusEntry entry;
        auto& r = entry.record;
        r.id = obj.at("id").get<std::string>();
        if (obj.contains("doi") && obj["doi"].is_string()) r.doi = obj["doi"].get<std::string>();
        r.title = obj.at("title").get<std::string>();
        r.publication_date = CalendarDate::parse(obj.at("publication_date").get<std::string>());
        r.abstract_text = obj.at("abstract_text").get<std::string>();
        r.concepts = obj.at("concepts").get<std::vector<std::string>>();
        r.fetched_at = obj.at("fetched_at").get<std::string>();
        entry.ingested_at = obj.at("ingested_at").get<std::string>();
        entry.source_window.start = CalendarDate::parse(obj.at("window_start").get<std::string>());
        entry.source_window.end = CalendarDate::parse(obj.at("window_end").get<std::string>());
        return entry;
    } catch (const std::exception& e) {
        throw StorageError(std::string("corpus entry missing required field: ") + e.what());
    }
}

JsonlStore::JsonlStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(corpus_dir(), ec);
    if (ec) throw StorageError("cannot create store directory " + corpus_dir().string());
}

JsonlStore::FileMap JsonlStore::load_all_unlocked() const {
    FileMap files;
    if (!fs::is_directory(corpus_dir())) return files;
    for (const auto& entry : fs::directory_iterator(corpus_dir())) {
        if (!entry.is_regular_file() || entry.path().extension() != ".jsonl") continue;
        files[entry.path().filename().string()] = read_jsonl_file(entry.path());
    }
    return files;
}

void JsonlStore::write_files(const FileMap& files, const std::vector<std::string>& touched) const {
    // Stage every touched file first, then rename, so an I/O failure while
    // staging leaves the store untouched.
    std::vector<std::pair<fs::path, fs::path>> staged;
    for (const auto& name : touched) {
        const fs::path final_path = corpus_dir() / name;
        const fs::path tmp_path = corpus_dir() / (name + ".tmp");
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw StorageError("cannot write " + tmp_path.string());
        for (const auto& entry : files.at(name)) {
            out << entry_to_json(entry).dump() << '\n';
        }
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp_path, ec);
            throw StorageError("write failed for " + tmp_path.string());
        }
        staged.emplace_back(tmp_path, final_path);
    }
    for (const auto& [tmp_path, final_path] : staged) {
        std::error_code ec;
        fs::rename(tmp_path, final_path, ec);
        if (ec) throw StorageError("rename failed for " + final_path.string());
    }
}

UpsertResult JsonlStore::upsert(const std::vector<CorpusEntry>& entries) {
    std::unique_lock lock(mutex_);
    FileMap files = load_all_unlocked();

    // Global id index: one entry per work id across all month files.
    std::map<std::string, std::pair<std::string, size_t>> index;  // id -> (file, position)
    for (const auto& [name, list] : files) {
        for (size_t i = 0; i < list.size(); ++i) index[list[i].record.id] = {name, i};
    }

    UpsertResult result;
    std::vector<std::string> touched;
    auto mark_touched = [&touched](const std::string& name) {
        if (std::find(touched.begin(), touched.end(), name) == touched.end()) {
            touched.push_back(name);
        }
    };

    for (const auto& entry : entries) {
        const std::string target = month_filename(entry.source_window);
        auto it = index.find(entry.record.id);
        if (it == index.end()) {
            auto& list = files[target];
            list.push_back(entry);
            index[entry.record.id] = {target, list.size() - 1};
            ++result.inserted;
            mark_touched(target);
            continue;
        }
        const auto [old_file, old_pos] = it->second;
        if (old_file == target) {
            files[target][old_pos] = entry;
        } else {
            // The entry moved to a different source month: drop the old copy.
            auto& old_list = files[old_file];
            old_list.erase(old_list.begin() + long(old_pos));
            for (auto& [id, loc] : index) {
                if (loc.first == old_file && loc.second > old_pos) --loc.second;
            }
            auto& list = files[target];
            list.push_back(entry);
            index[entry.record.id] = {target, list.size() - 1};
            mark_touched(old_file);
        }
        ++result.replaced;
        mark_touched(target);
    }

    write_files(files, touched);
    return result;
}

std::vector<CorpusEntry> JsonlStore::list_by_window(const DateWindow& window) const {
    std::shared_lock lock(mutex_);
    std::vector<CorpusEntry> out;
    for (const auto& [name, list] : load_all_unlocked()) {
        for (const auto& entry : list) {
            if (window.contains(entry.record.publication_date)) out.push_back(entry);
        }
    }
    sort_canonical(out);
    return out;
}

size_t JsonlStore::export_jsonl(const DateWindow& window, const fs::path& path) const {
    const auto entries = list_by_window(window);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot open export file " + path.string());
    for (const auto& entry : entries) {
        out << entry_to_json(entry).dump() << '\n';
    }
    out.flush();
    if (!out) throw StorageError("export write failed for " + path.string());
    return entries.size();
}

size_t JsonlStore::import_jsonl(const fs::path& path) {
    const auto entries = read_jsonl_file(path);
    upsert(entries);
    return entries.size();
}

StoreStats JsonlStore::stats() const {
    std::shared_lock lock(mutex_);
    StoreStats s;
    std::vector<DateWindow> windows;
    for (const auto& [name, list] : load_all_unlocked()) {
        for (const auto& entry : list) {
            ++s.total_entries;
            if (entry.record.abstract_text.empty()) ++s.entries_missing_abstract;
            if (std::find(windows.begin(), windows.end(), entry.source_window) == windows.end()) {
                windows.push_back(entry.source_window);
            }
        }
    }
    std::sort(windows.begin(), windows.end(),
              [](const DateWindow& a, const DateWindow& b) { return a.start < b.start; });
    s.windows_present = std::move(windows);
    return s;
}

}  // namespace digest::store
