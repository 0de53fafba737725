#pragma once

#include <stdexcept>
#include <string>

namespace cadejo {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- ingestion ---------------------------------------------------------

struct network_error : error {
    using error::error;
};

struct http_error : error {
    int status;
    explicit http_error(int status_, const std::string& what_ = "")
        : error("http status " + std::to_string(status_) +
                (what_.empty() ? "" : ": " + what_)),
          status(status_) {}
};

struct oversize_error : error {
    using error::error;
};

struct feed_parse_error : error {
    using error::error;
};

// -- extraction --------------------------------------------------------

struct extraction_error : error {
    using error::error;
};

struct encoding_error : error {
    using error::error;
};

// -- analysis ----------------------------------------------------------

struct empty_vocabulary_error : error {
    using error::error;
};

struct empty_corpus_error : error {
    using error::error;
};

struct alignment_error : error {
    using error::error;
};

// -- publishing / persistence ------------------------------------------

struct io_error : error {
    using error::error;
};

struct http_publish_error : error {
    int status;
    http_publish_error(int status_, const std::string& body_excerpt)
        : error("publish failed with status " + std::to_string(status_) +
                (body_excerpt.empty() ? "" : ": " + body_excerpt)),
          status(status_) {}
};

struct log_corrupt_error : error {
    std::size_t line_no;
    log_corrupt_error(const std::string& file, std::size_t line_no_)
        : error(file + ": malformed record at line " + std::to_string(line_no_)),
          line_no(line_no_) {}
};

// -- configuration -----------------------------------------------------

struct config_error : error {
    std::string field_path;
    std::string reason;
    config_error(std::string field_path_, std::string reason_)
        : error(field_path_ + ": " + reason_),
          field_path(std::move(field_path_)),
          reason(std::move(reason_)) {}
};

}  // namespace cadejo
