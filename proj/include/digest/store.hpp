#pragma once

#include <filesystem>
#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "digest/dates.hpp"
#include "digest/ingest.hpp"

namespace digest::store {

struct CorpusEntry {
    ingest::WorkRecord record;
    std::string ingested_at;  // ISO-8601 UTC
    DateWindow source_window;

    bool operator==(const CorpusEntry&) const = default;
};

struct UpsertResult {
    int inserted = 0;
    int replaced = 0;
};

struct StoreStats {
    size_t total_entries = 0;
    std::vector<DateWindow> windows_present;
    size_t entries_missing_abstract = 0;
};

nlohmann::ordered_json entry_to_json(const CorpusEntry& entry);
CorpusEntry entry_from_json(const nlohmann::ordered_json& obj);

// Persistence boundary between pipeline stages. Exactly one entry per work id;
// listing follows the pipeline's canonical ordering (publication_date, id).
class CorpusStore {
public:
    virtual ~CorpusStore() = default;
    virtual UpsertResult upsert(const std::vector<CorpusEntry>& entries) = 0;
    virtual std::vector<CorpusEntry> list_by_window(const DateWindow& window) const = 0;
    virtual size_t export_jsonl(const DateWindow& window, const std::filesystem::path& path) const = 0;
    virtual StoreStats stats() const = 0;
};

// Canonical file-backed store: one JSONL file per source month under
// <root>/corpus/<YYYY>_<MM>.jsonl, UTF-8, LF line endings. Writes are
// serialized and go through a temp-file rename so readers never see torn
// lines.
class JsonlStore : public CorpusStore {
public:
    explicit JsonlStore(std::filesystem::path root);

    UpsertResult upsert(const std::vector<CorpusEntry>& entries) override;
    std::vector<CorpusEntry> list_by_window(const DateWindow& window) const override;
    size_t export_jsonl(const DateWindow& window, const std::filesystem::path& path) const override;
    StoreStats stats() const override;

    size_t import_jsonl(const std::filesystem::path& path);

    std::filesystem::path corpus_dir() const { return root_ / "corpus"; }

private:
    using FileMap = std::map<std::string, std::vector<CorpusEntry>>;  // filename -> entries

    FileMap load_all_unlocked() const;
    void write_files(const FileMap& files, const std::vector<std::string>& touched) const;

    std::filesystem::path root_;
    mutable std::shared_mutex mutex_;
};

}  // namespace digest::store
