/* End-to-end demo of the votum C ABI.
 *
 * Build (from the workspace root, after `cargo build --release`):
 *   gcc -std=c11 -Wall -I crates/ffi/include crates/ffi/examples/demo.c \
 *       -L target/release -lvotum_ffi -lm -o votum_demo
 *   LD_LIBRARY_PATH=target/release ./votum_demo telemetry.csv
 *
 * The input CSV needs a binary `label` column (0/1) and a `type`
 * column with the attack-type vocabulary.
 */

#include <stdio.h>
#include "votum.h"

static int fail(const char *what) {
    fprintf(stderr, "%s: %s\n", what, votum_last_error());
    return 1;
}

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s telemetry.csv\n", argv[0]);
        return 1;
    }
    printf("votum %s\n", votum_version());

    double committee_error = 0.0;
    if (votum_ensemble_error(5, 0.1, -1, &committee_error) != VOTUM_STATUS_OK)
        return fail("ensemble error");
    printf("5 members at 10%% error -> majority wrong with p = %.9f\n", committee_error);

    VotumDataset *raw = NULL, *prepared = NULL;
    if (votum_dataset_read_csv(argv[1], &raw) != VOTUM_STATUS_OK)
        return fail("read csv");
    printf("loaded %zu rows x %zu columns\n", votum_dataset_rows(raw), votum_dataset_cols(raw));

    if (votum_dataset_prepare(raw, &prepared) != VOTUM_STATUS_OK)
        return fail("prepare");

    char *stats = NULL;
    if (votum_dataset_stats_json(prepared, &stats) == VOTUM_STATUS_OK) {
        printf("per-type counts: %s\n", stats);
        votum_string_free(stats);
    }

    VotumModel *model = NULL;
    if (votum_train(prepared, "dt-rf-knn-nb", VOTUM_TASK_BINARY, VOTUM_VOTING_HARD, 42, &model) !=
        VOTUM_STATUS_OK)
        return fail("train");

    double metrics[4];
    if (votum_model_evaluate(model, prepared, VOTUM_AVERAGING_WEIGHTED, metrics) != VOTUM_STATUS_OK)
        return fail("evaluate");
    printf("accuracy %.4f  precision %.4f  recall %.4f  f-measure %.4f\n", metrics[0], metrics[1],
           metrics[2], metrics[3]);

    if (votum_model_save(model, "votum_model.json") != VOTUM_STATUS_OK)
        return fail("save");
    if (votum_model_predict_csv(model, prepared, "votum_predictions.csv") != VOTUM_STATUS_OK)
        return fail("predict");
    printf("wrote votum_model.json and votum_predictions.csv\n");

    votum_model_free(model);
    votum_dataset_free(prepared);
    votum_dataset_free(raw);
    return 0;
}
