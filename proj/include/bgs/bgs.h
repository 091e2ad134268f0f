/* bigrasp C API: bimanual grasp saliency learning and prediction on point
 * clouds.
 *
 * Every function returns BGS_OK (0) on success or an error status matching
 * the CLI exit-code convention: 2 configuration, 3 data, 4 numeric. On
 * failure bgs_last_error() returns a thread-local message describing what
 * went wrong. Handles are opaque; free them with the matching *_free call.
 *
 * Command entry points take a JSON configuration document (the same schema
 * the CLI reads from --config files); unknown keys are rejected.
 */
#ifndef BGS_H
#define BGS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define BGS_OK 0
#define BGS_ERR_CONFIG 2
#define BGS_ERR_DATA 3
#define BGS_ERR_NUMERIC 4

typedef int bgs_status;

const char* bgs_version(void);
/* Message for the most recent failure on this thread; empty if none. */
const char* bgs_last_error(void);

/* ---- command entry points (mirror the CLI subcommands) ---- */

/* Generate a synthetic dataset (objects, annotations, manifest). */
bgs_status bgs_gen_data(const char* config_json);
/* Train the correction module, then the saliency/contact nets jointly;
 * writes model.bgsw, traces and the resolved config into the output dir. */
bgs_status bgs_train(const char* config_json);
/* Predict a bimanual map and masked contact labels for one object. */
bgs_status bgs_infer(const char* config_json);
/* Physics-aware refinement plus clustered contact extraction. */
bgs_status bgs_refine(const char* config_json);
/* Metric report (coverage rate, balance distances) over a dataset split. */
bgs_status bgs_eval(const char* config_json);
/* Re-export an object PLY with saliency mapped to vertex colors. */
bgs_status bgs_export_ply(const char* config_json);

/* ---- object handles ---- */

typedef struct bgs_object bgs_object;

/* Synthesize a procedural object: category in {mug, pot, pan, kettle, vase,
 * kitchen-pot, tool, cad}. */
bgs_status bgs_object_generate(const char* category, uint64_t seed,
                               int n_points, bgs_object** out);
bgs_status bgs_object_load_ply(const char* path, bgs_object** out);
/* binary != 0 writes binary_little_endian, else ascii; with_colors adds the
 * blue-to-red saliency colormap. */
bgs_status bgs_object_save_ply(const bgs_object* object, const char* path,
                               int binary, int with_colors);
int bgs_object_size(const bgs_object* object);
/* Buffers are caller-allocated: xyz needs 3*N doubles, maps N doubles,
 * labels N ints. Saliency getters fail if the object carries none. */
bgs_status bgs_object_points(const bgs_object* object, double* xyz);
bgs_status bgs_object_saliency(const bgs_object* object, double* values);
bgs_status bgs_object_bimanual(const bgs_object* object, double* values);
bgs_status bgs_object_labels(const bgs_object* object, int* labels);
void bgs_object_free(bgs_object* object);

/* ---- model handles ---- */

typedef struct bgs_model bgs_model;

/* Fresh seeded weights with the default architecture. */
bgs_status bgs_model_init(uint64_t seed, bgs_model** out);
bgs_status bgs_model_load(const char* path, bgs_model** out);
bgs_status bgs_model_save(const bgs_model* model, const char* path);
void bgs_model_free(bgs_model* model);

/* ---- inference on handles ---- */

/* Runs correction + saliency adjustment + contact classification; stores the
 * bimanual map and predicted labels on the object. */
bgs_status bgs_predict(const bgs_model* model, bgs_object* object);
/* Test-time balance refinement of the stored bimanual map. Out-params may be
 * NULL. */
bgs_status bgs_refine_object(const bgs_model* model, bgs_object* object,
                             double w_r, int max_iters,
                             double* final_distance, int* iterations,
                             int* warned);
/* Clustered contact extraction over the stored bimanual map. left/right are
 * caller buffers of capacity `capacity`; counts receive the set sizes. */
bgs_status bgs_cluster_contacts(const bgs_object* object, uint64_t seed,
                                int* left, int* left_count, int* right,
                                int* right_count, int capacity);

/* ---- metrics ---- */

/* Coverage rate of annotated contacts by map values >= tau_c (percent). */
bgs_status bgs_bcacr(const bgs_object* object, double tau_c, double* out);
/* Balance distance of the stored bimanual map under predicted labels. */
bgs_status bgs_balance_distance(const bgs_object* object, double* out);

#ifdef __cplusplus
}
#endif

#endif /* BGS_H */
