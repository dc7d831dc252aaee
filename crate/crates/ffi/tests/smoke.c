#include <math.h>
#include <stdio.h>
#include "tfrotor.h"

int main(void) {
    TfrGrid *grid = NULL;
    TfrSignal *sig = NULL, *rot = NULL;
    TfrEstimate est;
    double theta = 0.4;
    if (tfr_grid_default(1, &grid) != TFR_STATUS_OK) return 1;
    if (tfr_signal_generate(grid, "gaussian", &sig) != TFR_STATUS_OK) return 2;
    if (tfr_frft(sig, &theta, 1, &rot) != TFR_STATUS_OK) return 3;
    if (tfr_mp_norm(rot, TFR_METHOD_STFT, 2.0, 0, 0, &est) != TFR_STATUS_OK) return 4;
    if (fabs(est.value - 1.0) > 1e-6) return 5;
    if (tfr_grid_new(5, 64, 8.0, &grid) != TFR_STATUS_INVALID_GRID || tfr_last_error() == NULL) return 6;
    printf("%.6f\n", est.value);
    tfr_signal_free(rot);
    tfr_signal_free(sig);
    return 0;
}
