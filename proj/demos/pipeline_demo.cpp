// End-to-end walkthrough: generate a planted dataset, evaluate the
// unfiltered baseline, then run the filter experiment and print the result
// table.

#include <iostream>

#include "homophily/report.hpp"
#include "homophily/sweep.hpp"
#include "homophily/synth.hpp"

int main() {
    homophily::SynthConfig config;
    config.n_users = 8000;
    config.n_regions = 10;
    config.beta1 = 3.0;
    config.seed = 7;

    const homophily::SynthDataset dataset = homophily::generate(config);
    std::cout << homophily::stats_report_table(
        {{"planted-demo", homophily::graph_stats(dataset.graph)}});

    homophily::ExperimentOptions options;
    options.workers = 2;
    const homophily::ExperimentReport report =
        homophily::run_experiment(dataset.graph, dataset.labels, dataset.attributes, options);
    std::cout << '\n' << homophily::experiment_report_table("planted-demo", report);
    return 0;
}
