#include "tsk/serialize.hpp"

#include <fstream>

namespace tsk {

nlohmann::json model_to_json(const TskModel& model) {
    nlohmann::json doc;
    doc["mf_type"] = mf_type_name(model.mf_type());
    doc["num_features"] = model.num_features();
    nlohmann::json rules = nlohmann::json::array();
    for (const Rule& rule : model.rules()) {
        nlohmann::json entry;
        nlohmann::json antecedents = nlohmann::json::array();
        for (const MembershipFunction& mf : rule.antecedents) {
            if (model.mf_type() == MfType::gaussian) {
                const auto& g = std::get<GaussianMf>(mf);
                antecedents.push_back({{"center", g.center}, {"spread", g.spread}});
            } else {
                const auto& t = std::get<TrapezoidMf>(mf);
                antecedents.push_back({{"a", t.a}, {"b", t.b}, {"c", t.c}, {"d", t.d}});
            }
        }
        entry["antecedents"] = std::move(antecedents);
        entry["bias"] = rule.bias;
        entry["weights"] = rule.weights;
        rules.push_back(std::move(entry));
    }
    doc["rules"] = std::move(rules);
    return doc;
}

TskModel model_from_json(const nlohmann::json& doc) {
    try {
        const std::string type_name = doc.at("mf_type").get<std::string>();
        if (type_name != "gaussian" && type_name != "trapezoid")
            throw DataError("model_from_json: unknown mf_type '" + type_name + "'");
        const MfType type = type_name == "gaussian" ? MfType::gaussian : MfType::trapezoid;
        const int num_features = doc.at("num_features").get<int>();
        std::vector<Rule> rules;
        for (const auto& entry : doc.at("rules")) {
            Rule rule;
            for (const auto& mf : entry.at("antecedents")) {
                if (type == MfType::gaussian)
                    rule.antecedents.emplace_back(
                        GaussianMf(mf.at("center").get<double>(), mf.at("spread").get<double>()));
                else
                    rule.antecedents.emplace_back(TrapezoidMf(mf.at("a").get<double>(),
                                                              mf.at("b").get<double>(),
                                                              mf.at("c").get<double>(),
                                                              mf.at("d").get<double>()));
            }
            rule.bias = entry.at("bias").get<double>();
            rule.weights = entry.at("weights").get<std::vector<double>>();
            rules.push_back(std::move(rule));
        }
        return TskModel(std::move(rules), num_features);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model_from_json: malformed document: ") + e.what());
    }
}

void save_model(const TskModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("save_model: cannot open '" + path + "' for writing");
    out << model_to_json(model).dump(2) << '\n';
}

TskModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("load_model: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("load_model: invalid JSON in '" + path + "': " + e.what());
    }
    return model_from_json(doc);
}

} // namespace tsk
