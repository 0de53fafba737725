#pragma once

#include <string>
#include <thread>

#include "cadejo/http.hpp"
#include "cadejo/model.hpp"
#include "helpers.hpp"

namespace testutil {

// Three fixture outlets served over loopback: lpg and edh cover the same
// election story (they should cluster together), lpg also carries a crime
// story and col an economy story.
class fixture_site {
public:
    fixture_site() {
        add_page("/lpg/nota-tribunal",
                 "Tribunal electoral define fecha de elecciones",
                 {"El tribunal supremo electoral definió este martes la fecha "
                  "de las elecciones presidenciales tras depurar el padrón "
                  "electoral de votantes.",
                  "Los magistrados del tribunal aseguraron que el padrón "
                  "electoral quedará depurado antes de los comicios "
                  "presidenciales.",
                  "Los partidos políticos pidieron observación internacional "
                  "para las elecciones presidenciales."});
        add_page("/lpg/nota-captura",
                 "Capturan banda de asaltantes en la capital",
                 {"La policía capturó a cinco asaltantes que operaban en los "
                  "mercados municipales de la capital.",
                  "Los detenidos enfrentarán cargos por robo agravado según "
                  "informó la fiscalía general."});
        add_page("/edh/nota-elecciones",
                 "Elecciones presidenciales ya tienen fecha según el tribunal",
                 {"El tribunal electoral anunció la fecha de los comicios "
                  "presidenciales junto con la depuración del padrón electoral "
                  "de votantes.",
                  "Los partidos políticos reaccionaron al anuncio del tribunal "
                  "electoral y pidieron garantías para las elecciones "
                  "presidenciales."});
        add_page("/col/nota-remesas",
                 "Remesas familiares crecen cinco por ciento",
                 {"Las remesas familiares crecieron cinco por ciento durante "
                  "el último trimestre según cifras del banco central de "
                  "reserva.",
                  "Los economistas atribuyen el aumento de las remesas al "
                  "empleo de los migrantes salvadoreños en el exterior."});

        add_feed("/lpg/rss", "La Prensa Fixture",
                 {{"Tribunal electoral define fecha de elecciones",
                   "/lpg/nota-tribunal"},
                  {"Capturan banda de asaltantes en la capital",
                   "/lpg/nota-captura"}});
        add_feed("/edh/rss", "El Diario Fixture",
                 {{"Elecciones presidenciales ya tienen fecha según el tribunal",
                   "/edh/nota-elecciones"}});
        add_feed("/col/rss", "Co Latino Fixture",
                 {{"Remesas familiares crecen cinco por ciento",
                   "/col/nota-remesas"}});

        port_ = srv_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { srv_.listen_after_bind(); });
        srv_.wait_until_ready();
    }

    ~fixture_site() {
        srv_.stop();
        if (thread_.joinable()) thread_.join();
    }

    int port() const { return port_; }

    std::string url(const std::string& path) const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }

    // config document pointing at this server; paths resolve relative to
    // wherever the caller writes the file
    cadejo::json config_json(int lda_topics = 4, int sweeps = 200,
                             std::uint64_t seed = 20081028) const {
        cadejo::json j;
        j["outlets"] = cadejo::json::array(
            {{{"id", "lpg"}, {"name", "La Prensa Fixture"}, {"feed_url", url("/lpg/rss")}},
             {{"id", "edh"}, {"name", "El Diario Fixture"}, {"feed_url", url("/edh/rss")}},
             {{"id", "col"}, {"name", "Co Latino Fixture"}, {"feed_url", url("/col/rss")}}});
        j["fetch"] = {{"timeout_s", 5}, {"max_retries", 1}, {"retry_backoff_s", 0}};
        j["lda"] = {{"topics", lda_topics},
                    {"sweeps", sweeps},
                    {"burn_in", sweeps / 2},
                    {"seed", seed}};
        j["out_dir"] = "site";
        j["data_dir"] = "data";
        return j;
    }

private:
    void add_page(const std::string& path, const std::string& title,
                  const std::vector<std::string>& paragraphs) {
        std::string html = "<!DOCTYPE html><html><head><meta charset=\"utf-8\">"
                           "<title>" + title + " | Fixture</title></head><body>"
                           "<nav><a href=\"/\">Inicio</a> <a href=\"/x\">Otra</a></nav>"
                           "<div class=\"nota\">";
        for (const auto& p : paragraphs) html += "<p>" + p + "</p>";
        html += "</div><footer>derechos reservados fixture</footer></body></html>";
        srv_.Get(path, [html](const httplib::Request&, httplib::Response& res) {
            res.set_content(html, "text/html; charset=utf-8");
        });
    }

    void add_feed(const std::string& path, const std::string& name,
                  const std::vector<std::pair<std::string, std::string>>& items) {
        feeds_.push_back({path, name, items});
        const auto& entry = feeds_.back();
        srv_.Get(path, [this, &entry](const httplib::Request&, httplib::Response& res) {
            std::string xml = "<?xml version=\"1.0\" encoding=\"utf-8\"?>"
                              "<rss version=\"2.0\"><channel><title>" +
                              entry.name + "</title>";
            for (const auto& [title, page_path] : entry.items) {
                xml += "<item><title>" + title + "</title><link>" + url(page_path) +
                       "</link><pubDate>Tue, 28 Oct 2008 06:00:00 GMT</pubDate>"
                       "</item>";
            }
            xml += "</channel></rss>";
            res.set_content(xml, "application/rss+xml");
        });
    }

    struct feed_entry {
        std::string path;
        std::string name;
        std::vector<std::pair<std::string, std::string>> items;
    };

    httplib::Server srv_;
    std::vector<feed_entry> feeds_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace testutil
