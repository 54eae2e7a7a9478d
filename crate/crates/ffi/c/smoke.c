/* Minimal C consumer of the trialalloc C ABI. */
#include <math.h>
#include <stdio.h>

#include "trialalloc.h"

static const char *CPORT =
    "{\"trial_kind\":\"noninferiority_two_arm\","
    "\"control\":{\"family\":\"binomial\",\"prob\":0.008},"
    "\"margin\":{\"kind\":\"additive\",\"value\":0.004},"
    "\"direction\":\"lower_favorable\","
    "\"variance_eval_point\":\"null_boundary\"}";

int main(void) {
    TaDesign *design = NULL;
    if (ta_design_from_json(CPORT, &design) != TA_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", ta_last_error_message());
        return 1;
    }

    TaAllocation plan;
    if (ta_allocate(design, &plan) != TA_STATUS_OK) {
        fprintf(stderr, "allocate: %s\n", ta_last_error_message());
        ta_design_free(design);
        return 1;
    }
    printf("ratio %.2f\n", plan.ratio_treatment_to_control);

    TaSampleSize n;
    TaStatus status = ta_sample_size(design, NAN, &n);
    printf("sample_size status %d: %s\n", (int)status, ta_last_error_message());
    ta_design_free(design);

    TaEvents events;
    if (ta_events(1.5, 0.025, 0.9, TA_SURVIVAL_METHOD_JUNG, NAN, &events) != TA_STATUS_OK) {
        return 1;
    }
    printf("events %llu\n", (unsigned long long)events.d_events);
    return 0;
}
