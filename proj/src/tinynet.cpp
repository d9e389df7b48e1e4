#include "ilg/tinynet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "ilg/parallel.hpp"

namespace ilg {

namespace {

constexpr int kConv1Out = 8;
constexpr int kConv2Out = 16;

// Copies planes into a zero-padded (h+2) x (w+2) frame; the pad turns every
// 3x3 tap into a uniform full-width row pass (the zero terms are exact, so
// results match the bounds-checked form bit for bit).
template <typename T>
void pad_planes(const T* in, int c, int h, int w, std::vector<T>& out) {
  const int pw = w + 2;
  out.assign(static_cast<std::size_t>(c) * (h + 2) * pw, T(0));
  for (int ic = 0; ic < c; ++ic) {
    for (int y = 0; y < h; ++y) {
      std::copy(in + (static_cast<std::size_t>(ic) * h + y) * w,
                in + (static_cast<std::size_t>(ic) * h + y) * w + w,
                out.begin() + (static_cast<std::size_t>(ic) * (h + 2) + y + 1) * pw + 1);
    }
  }
}

template <typename T>
void conv3x3_forward(const T* __restrict__ pad, int cin, int h, int w, const T* __restrict__ wts,
                     const T* __restrict__ bias, T* __restrict__ out, int cout) {
  const int pw = w + 2;
  const int plane = h * w;
  const int pplane = (h + 2) * pw;
  for (int oc = 0; oc < cout; ++oc) {
    T* op = out + static_cast<std::size_t>(oc) * plane;
    std::fill(op, op + plane, bias[oc]);
    for (int ic = 0; ic < cin; ++ic) {
      const T* pp = pad + static_cast<std::size_t>(ic) * pplane;
      const T* wk = wts + (static_cast<std::size_t>(oc) * cin + ic) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const T wv = wk[ky * 3 + kx];
          for (int y = 0; y < h; ++y) {
            T* __restrict__ orow = op + static_cast<std::size_t>(y) * w;
            const T* __restrict__ irow = pp + static_cast<std::size_t>(y + ky) * pw + kx;
            for (int x = 0; x < w; ++x) orow[x] += wv * irow[x];
          }
        }
      }
    }
  }
}

// Gradient w.r.t. the convolution input, accumulated in a padded frame
// whose border (contributions to out-of-image pixels) is then dropped.
template <typename T>
void conv3x3_backward_data(const T* __restrict__ dout, int cout, int h, int w,
                           const T* __restrict__ wts, std::vector<T>& dpad_scratch,
                           T* __restrict__ din, int cin) {
  const int pw = w + 2;
  const int plane = h * w;
  const int pplane = (h + 2) * pw;
  dpad_scratch.assign(static_cast<std::size_t>(cin) * pplane, T(0));
  T* dpad = dpad_scratch.data();
  for (int oc = 0; oc < cout; ++oc) {
    const T* dop = dout + static_cast<std::size_t>(oc) * plane;
    for (int ic = 0; ic < cin; ++ic) {
      T* dpp = dpad + static_cast<std::size_t>(ic) * pplane;
      const T* wk = wts + (static_cast<std::size_t>(oc) * cin + ic) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const T wv = wk[ky * 3 + kx];
          for (int y = 0; y < h; ++y) {
            T* __restrict__ drow = dpp + static_cast<std::size_t>(y + ky) * pw + kx;
            const T* __restrict__ dorow = dop + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) drow[x] += wv * dorow[x];
          }
        }
      }
    }
  }
  for (int ic = 0; ic < cin; ++ic) {
    for (int y = 0; y < h; ++y) {
      std::copy(dpad + (static_cast<std::size_t>(ic) * (h + 2) + y + 1) * pw + 1,
                dpad + (static_cast<std::size_t>(ic) * (h + 2) + y + 1) * pw + 1 + w,
                din + (static_cast<std::size_t>(ic) * h + y) * w);
    }
  }
}

// Gradients w.r.t. weights and bias, accumulated into dw/db. Reads the
// padded input planes; eight explicit accumulator lanes keep the reduction
// order fixed while letting the row loop vectorize.
template <typename T>
void conv3x3_backward_filter(const T* __restrict__ pad, int cin, int h, int w,
                             const T* __restrict__ dout, int cout, T* __restrict__ dw,
                             T* __restrict__ db) {
  const int pw = w + 2;
  const int plane = h * w;
  const int pplane = (h + 2) * pw;
  for (int oc = 0; oc < cout; ++oc) {
    const T* dop = dout + static_cast<std::size_t>(oc) * plane;
    double bias_acc = 0;
    for (int i = 0; i < plane; ++i) bias_acc += static_cast<double>(dop[i]);
    db[oc] += static_cast<T>(bias_acc);
    for (int ic = 0; ic < cin; ++ic) {
      const T* pp = pad + static_cast<std::size_t>(ic) * pplane;
      T* wk = dw + (static_cast<std::size_t>(oc) * cin + ic) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          T lanes[8] = {};
          for (int y = 0; y < h; ++y) {
            const T* __restrict__ dorow = dop + static_cast<std::size_t>(y) * w;
            const T* __restrict__ irow = pp + static_cast<std::size_t>(y + ky) * pw + kx;
            int x = 0;
            for (; x + 8 <= w; x += 8) {
              for (int l = 0; l < 8; ++l) lanes[l] += dorow[x + l] * irow[x + l];
            }
            for (int l = 0; x < w; ++x, ++l) lanes[l] += dorow[x] * irow[x];
          }
          double acc = 0;
          for (int l = 0; l < 8; ++l) acc += static_cast<double>(lanes[l]);
          wk[ky * 3 + kx] += static_cast<T>(acc);
        }
      }
    }
  }
}

template <typename T>
void relu_inplace(T* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] = a[i] > T(0) ? a[i] : T(0);
}

// First maximum in scan order wins ties, so pooling is deterministic.
template <typename T>
void maxpool2_forward(const T* in, int c, int h, int w, T* out, int* idx) {
  const int oh = h / 2, ow = w / 2;
  for (int ch = 0; ch < c; ++ch) {
    const T* ip = in + static_cast<std::size_t>(ch) * h * w;
    T* op = out + static_cast<std::size_t>(ch) * oh * ow;
    int* xp = idx + static_cast<std::size_t>(ch) * oh * ow;
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const int base = (2 * y) * w + 2 * x;
        int best = base;
        T bv = ip[base];
        const int cands[3] = {base + 1, base + w, base + w + 1};
        for (int cand : cands) {
          if (ip[cand] > bv) {
            bv = ip[cand];
            best = cand;
          }
        }
        op[y * ow + x] = bv;
        xp[y * ow + x] = best;
      }
    }
  }
}

template <typename T>
void maxpool2_backward(const T* dout, int c, int h, int w, const int* idx, T* din) {
  const int oh = h / 2, ow = w / 2;
  std::fill(din, din + static_cast<std::size_t>(c) * h * w, T(0));
  for (int ch = 0; ch < c; ++ch) {
    const T* dop = dout + static_cast<std::size_t>(ch) * oh * ow;
    const int* xp = idx + static_cast<std::size_t>(ch) * oh * ow;
    T* dip = din + static_cast<std::size_t>(ch) * h * w;
    for (int i = 0; i < oh * ow; ++i) dip[xp[i]] += dop[i];
  }
}

template <typename T>
struct Activations {
  std::vector<T> input;      // [3][S][S]
  std::vector<T> input_pad;  // padded frames feeding conv1
  std::vector<T> c1;         // post-relu
  std::vector<T> p1;
  std::vector<T> p1_pad;  // padded frames feeding conv2
  std::vector<int> p1_idx;
  std::vector<T> c2;  // post-relu
  std::vector<T> p2;
  std::vector<int> p2_idx;
  std::vector<T> logits;
  std::vector<T> dpad;  // scratch for conv backward-data
};

template <typename T>
void prepare_input(const ModelT<T>& model, const Image& img, std::vector<T>& out) {
  const int s = model.input_size;
  const Image* use = &img;
  Image resized;
  if (img.height != s || img.width != s) {
    resized = resize_image(img, s, s);
    use = &resized;
  }
  out.resize(static_cast<std::size_t>(3) * s * s);
  for (int c = 0; c < 3; ++c) {
    const double mean = model.norm.mean[c];
    const double inv_std = 1.0 / model.norm.stddev[c];
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) {
        out[(static_cast<std::size_t>(c) * s + y) * s + x] =
            static_cast<T>((use->at(y, x, c) - mean) * inv_std);
      }
    }
  }
}

template <typename T>
void forward_sample(const ModelT<T>& model, const Image& img, Activations<T>& act) {
  const int s = model.input_size;
  prepare_input(model, img, act.input);
  act.logits.assign(kClasses, T(0));

  const T* fc_in_ptr;
  if (model.arch == ModelArch::TinyCnn) {
    const int s2 = s / 2, s4 = s / 4;
    pad_planes(act.input.data(), 3, s, s, act.input_pad);
    act.c1.resize(static_cast<std::size_t>(kConv1Out) * s * s);
    conv3x3_forward(act.input_pad.data(), 3, s, s, model.conv1_w.data(), model.conv1_b.data(),
                    act.c1.data(), kConv1Out);
    relu_inplace(act.c1.data(), act.c1.size());
    act.p1.resize(static_cast<std::size_t>(kConv1Out) * s2 * s2);
    act.p1_idx.resize(act.p1.size());
    maxpool2_forward(act.c1.data(), kConv1Out, s, s, act.p1.data(), act.p1_idx.data());

    pad_planes(act.p1.data(), kConv1Out, s2, s2, act.p1_pad);
    act.c2.resize(static_cast<std::size_t>(kConv2Out) * s2 * s2);
    conv3x3_forward(act.p1_pad.data(), kConv1Out, s2, s2, model.conv2_w.data(),
                    model.conv2_b.data(), act.c2.data(), kConv2Out);
    relu_inplace(act.c2.data(), act.c2.size());
    act.p2.resize(static_cast<std::size_t>(kConv2Out) * s4 * s4);
    act.p2_idx.resize(act.p2.size());
    maxpool2_forward(act.c2.data(), kConv2Out, s2, s2, act.p2.data(), act.p2_idx.data());
    fc_in_ptr = act.p2.data();
  } else {
    fc_in_ptr = act.input.data();
  }

  const int nin = model.fc_inputs();
  for (int o = 0; o < kClasses; ++o) {
    double acc = model.fc_b[o];
    const T* wrow = model.fc_w.data() + static_cast<std::size_t>(o) * nin;
    for (int i = 0; i < nin; ++i) acc += static_cast<double>(wrow[i]) * fc_in_ptr[i];
    act.logits[o] = static_cast<T>(acc);
  }
}

// Softmax cross-entropy plus dlogits; returns the loss.
template <typename T>
double softmax_ce_backward(const std::vector<T>& logits, int label, std::vector<T>& dlogits) {
  double mx = -std::numeric_limits<double>::infinity();
  for (T v : logits) mx = std::max(mx, static_cast<double>(v));
  double sum = 0;
  for (T v : logits) sum += std::exp(static_cast<double>(v) - mx);
  const double log_sum = std::log(sum) + mx;
  dlogits.resize(logits.size());
  for (std::size_t o = 0; o < logits.size(); ++o) {
    const double p = std::exp(static_cast<double>(logits[o]) - log_sum);
    dlogits[o] = static_cast<T>(p - (static_cast<int>(o) == label ? 1.0 : 0.0));
  }
  return log_sum - static_cast<double>(logits[label]);
}

template <typename T>
ModelT<T> zero_like(const ModelT<T>& m) {
  ModelT<T> z;
  z.arch = m.arch;
  z.input_size = m.input_size;
  z.norm = m.norm;
  z.conv1_w.assign(m.conv1_w.size(), T(0));
  z.conv1_b.assign(m.conv1_b.size(), T(0));
  z.conv2_w.assign(m.conv2_w.size(), T(0));
  z.conv2_b.assign(m.conv2_b.size(), T(0));
  z.fc_w.assign(m.fc_w.size(), T(0));
  z.fc_b.assign(m.fc_b.size(), T(0));
  return z;
}

// Gradient of one sample's loss w.r.t. every parameter.
template <typename T>
double backward_sample(const ModelT<T>& model, const Image& img, int label, ModelT<T>& grad,
                       Activations<T>& act) {
  forward_sample(model, img, act);
  std::vector<T> dlogits;
  const double loss = softmax_ce_backward(act.logits, label, dlogits);

  const int nin = model.fc_inputs();
  const T* fc_in_ptr = model.arch == ModelArch::TinyCnn ? act.p2.data() : act.input.data();
  std::vector<T> dfc_in(nin, T(0));
  for (int o = 0; o < kClasses; ++o) {
    const T d = dlogits[o];
    grad.fc_b[o] += d;
    T* gw = grad.fc_w.data() + static_cast<std::size_t>(o) * nin;
    const T* wrow = model.fc_w.data() + static_cast<std::size_t>(o) * nin;
    for (int i = 0; i < nin; ++i) {
      gw[i] += d * fc_in_ptr[i];
      dfc_in[i] += d * wrow[i];
    }
  }
  if (model.arch == ModelArch::LogReg) return loss;

  const int s = model.input_size;
  const int s2 = s / 2, s4 = s / 4;
  (void)s4;

  std::vector<T> dc2(act.c2.size());
  maxpool2_backward(dfc_in.data(), kConv2Out, s2, s2, act.p2_idx.data(), dc2.data());
  for (std::size_t i = 0; i < dc2.size(); ++i) {
    if (!(act.c2[i] > T(0))) dc2[i] = T(0);
  }
  conv3x3_backward_filter(act.p1_pad.data(), kConv1Out, s2, s2, dc2.data(), kConv2Out,
                          grad.conv2_w.data(), grad.conv2_b.data());
  std::vector<T> dp1(act.p1.size());
  conv3x3_backward_data(dc2.data(), kConv2Out, s2, s2, model.conv2_w.data(), act.dpad, dp1.data(),
                        kConv1Out);

  std::vector<T> dc1(act.c1.size());
  maxpool2_backward(dp1.data(), kConv1Out, s, s, act.p1_idx.data(), dc1.data());
  for (std::size_t i = 0; i < dc1.size(); ++i) {
    if (!(act.c1[i] > T(0))) dc1[i] = T(0);
  }
  conv3x3_backward_filter(act.input_pad.data(), 3, s, s, dc1.data(), kConv1Out,
                          grad.conv1_w.data(), grad.conv1_b.data());
  return loss;
}

template <typename T>
void check_batch(const ModelT<T>& model, const std::vector<Image>& batch,
                 const std::vector<int>* labels) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  if (labels != nullptr) {
    if (labels->size() != batch.size()) throw std::invalid_argument("labels/batch size mismatch");
    for (int l : *labels) {
      if (l < 0 || l >= kClasses) throw std::invalid_argument("label out of range");
    }
  }
  (void)model;
}

struct AdamState {
  std::vector<float> m, v;
  int t = 0;
};

}  // namespace

const char* model_arch_name(ModelArch a) { return a == ModelArch::TinyCnn ? "cnn" : "logreg"; }

ModelArch model_arch_from_name(const std::string& name) {
  if (name == "cnn") return ModelArch::TinyCnn;
  if (name == "logreg") return ModelArch::LogReg;
  throw std::invalid_argument("unknown model arch: " + name);
}

template <typename T>
std::size_t ModelT<T>::parameter_count() const {
  return conv1_w.size() + conv1_b.size() + conv2_w.size() + conv2_b.size() + fc_w.size() +
         fc_b.size();
}

template <typename T>
ModelT<T> init_model(ModelArch arch, int input_size, std::uint64_t seed) {
  if (input_size < 4 || input_size % 4 != 0) {
    throw std::invalid_argument("input_size must be a positive multiple of 4");
  }
  ModelT<T> m;
  m.arch = arch;
  m.input_size = input_size;
  Rng rng(derive_seed(seed, 0x1217ull));
  auto fill_gaussian = [&rng](std::vector<T>& v, std::size_t n, double sigma) {
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<T>(sigma * rng.gaussian());
  };
  if (arch == ModelArch::TinyCnn) {
    fill_gaussian(m.conv1_w, static_cast<std::size_t>(kConv1Out) * 3 * 9, std::sqrt(2.0 / 27.0));
    m.conv1_b.assign(kConv1Out, T(0));
    fill_gaussian(m.conv2_w, static_cast<std::size_t>(kConv2Out) * kConv1Out * 9,
                  std::sqrt(2.0 / 72.0));
    m.conv2_b.assign(kConv2Out, T(0));
    const int nin = m.fc_inputs();
    fill_gaussian(m.fc_w, static_cast<std::size_t>(kClasses) * nin, std::sqrt(1.0 / nin));
    m.fc_b.assign(kClasses, T(0));
  } else {
    // Convex problem; zero start.
    m.fc_w.assign(static_cast<std::size_t>(kClasses) * m.fc_inputs(), T(0));
    m.fc_b.assign(kClasses, T(0));
  }
  return m;
}

template <typename U, typename T>
ModelT<U> cast_model(const ModelT<T>& m) {
  ModelT<U> out;
  out.arch = m.arch;
  out.input_size = m.input_size;
  out.norm = m.norm;
  auto cv = [](const std::vector<T>& v) {
    std::vector<U> o(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) o[i] = static_cast<U>(v[i]);
    return o;
  };
  out.conv1_w = cv(m.conv1_w);
  out.conv1_b = cv(m.conv1_b);
  out.conv2_w = cv(m.conv2_w);
  out.conv2_b = cv(m.conv2_b);
  out.fc_w = cv(m.fc_w);
  out.fc_b = cv(m.fc_b);
  return out;
}

template <typename T>
std::vector<T> forward(const ModelT<T>& model, const std::vector<Image>& batch) {
  check_batch(model, batch, nullptr);
  std::vector<T> logits(batch.size() * kClasses);
  Activations<T> act;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    forward_sample(model, batch[i], act);
    std::copy(act.logits.begin(), act.logits.end(), logits.begin() + i * kClasses);
  }
  return logits;
}

double softmax_cross_entropy(const std::vector<double>& logits, int label) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logits) mx = std::max(mx, v);
  double sum = 0;
  for (double v : logits) sum += std::exp(v - mx);
  return std::log(sum) + mx - logits[label];
}

template <typename T>
std::pair<double, ModelT<T>> loss_and_grad(const ModelT<T>& model, const std::vector<Image>& batch,
                                           const std::vector<int>& labels, int threads) {
  check_batch(model, batch, &labels);
  const std::size_t n = batch.size();
  std::vector<ModelT<T>> sample_grads(n);
  std::vector<double> sample_losses(n);
  parallel_for(n, threads, [&](std::size_t i) {
    sample_grads[i] = zero_like(model);
    Activations<T> act;
    sample_losses[i] = backward_sample(model, batch[i], labels[i], sample_grads[i], act);
  });

  ModelT<T> grad = zero_like(model);
  double loss = 0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) loss += sample_losses[i];
  loss *= inv_n;

  // Fixed-order mean across samples, tensor by tensor, in double.
  std::vector<std::vector<T>*> out_tensors;
  grad.for_each_tensor([&](const char*, std::vector<T>& t) { out_tensors.push_back(&t); });
  std::vector<std::vector<std::vector<T>*>> in_tensors(n);
  for (std::size_t i = 0; i < n; ++i) {
    sample_grads[i].for_each_tensor(
        [&](const char*, std::vector<T>& t) { in_tensors[i].push_back(&t); });
  }
  for (std::size_t ti = 0; ti < out_tensors.size(); ++ti) {
    std::vector<T>& out = *out_tensors[ti];
    for (std::size_t k = 0; k < out.size(); ++k) {
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>((*in_tensors[i][ti])[k]);
      out[k] = static_cast<T>(acc * inv_n);
    }
  }
  return {loss, std::move(grad)};
}

TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const Augmentation& augmentation) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  {
    std::array<bool, kClasses> seen{};
    int distinct = 0;
    for (const auto& s : dataset) {
      if (s.label < 0 || s.label >= kClasses) throw std::invalid_argument("label out of range");
      if (!seen[s.label]) {
        seen[s.label] = true;
        ++distinct;
      }
    }
    if (distinct < 2) throw std::invalid_argument("training needs at least 2 classes");
  }
  if (config.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");

  auto [train_set, val_set] =
      stratified_split(dataset, config.val_split, derive_seed(config.seed, 0x59171ull));

  Model model = init_model<float>(config.arch, config.input_size, derive_seed(config.seed, 0x111ull));
  model.norm = compute_normalization(train_set);

  AdamState adam;
  adam.m.assign(model.parameter_count(), 0.f);
  adam.v.assign(model.parameter_count(), 0.f);

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  int epochs_since_best = 0;

  std::vector<int> val_labels(val_set.size());
  std::vector<Image> val_images(val_set.size());
  for (std::size_t i = 0; i < val_set.size(); ++i) {
    val_labels[i] = val_set[i].label;
    val_images[i] = val_set[i].image;
  }

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(config.seed, 0x5f1eull, static_cast<std::uint64_t>(epoch)));
    std::vector<std::uint32_t> order = shuffle_rng.permutation(static_cast<std::uint32_t>(train_set.size()));

    double epoch_loss = 0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      std::vector<Image> images(stop - start);
      std::vector<int> labels(stop - start);
      parallel_for(stop - start, config.threads, [&](std::size_t k) {
        const std::uint32_t idx = order[start + k];
        labels[k] = train_set[idx].label;
        if (augmentation) {
          Rng aug_rng(derive_seed(config.seed, 0xa46ull, static_cast<std::uint64_t>(epoch), idx));
          images[k] = augmentation(train_set[idx].image, aug_rng);
        } else {
          images[k] = train_set[idx].image;
        }
      });

      auto [loss, grad] = loss_and_grad(model, images, labels, config.threads);
      epoch_loss += loss * static_cast<double>(images.size());
      seen += images.size();

      // Adam step over the flat parameter order.
      adam.t += 1;
      const double bc1 = 1.0 - std::pow(config.beta1, adam.t);
      const double bc2 = 1.0 - std::pow(config.beta2, adam.t);
      std::size_t off = 0;
      std::vector<std::vector<float>*> params, grads;
      model.for_each_tensor([&](const char*, std::vector<float>& t) { params.push_back(&t); });
      grad.for_each_tensor([&](const char*, std::vector<float>& t) { grads.push_back(&t); });
      for (std::size_t ti = 0; ti < params.size(); ++ti) {
        std::vector<float>& p = *params[ti];
        const std::vector<float>& g = *grads[ti];
        for (std::size_t i = 0; i < p.size(); ++i, ++off) {
          const double gi = g[i];
          const double m1 = config.beta1 * adam.m[off] + (1.0 - config.beta1) * gi;
          const double v1 = config.beta2 * adam.v[off] + (1.0 - config.beta2) * gi * gi;
          adam.m[off] = static_cast<float>(m1);
          adam.v[off] = static_cast<float>(v1);
          const double update =
              config.learning_rate * (m1 / bc1) / (std::sqrt(v1 / bc2) + config.epsilon);
          p[i] = static_cast<float>(p[i] - update);
          if (!std::isfinite(p[i])) throw std::runtime_error("non-finite parameter after update");
        }
      }
    }
    result.train_losses.push_back(epoch_loss / static_cast<double>(seen));

    // Validation loss, fixed-order reduction.
    std::vector<double> vlosses(val_images.size());
    parallel_for(val_images.size(), config.threads, [&](std::size_t i) {
      Activations<float> act;
      forward_sample(model, val_images[i], act);
      std::vector<double> lg(act.logits.begin(), act.logits.end());
      vlosses[i] = softmax_cross_entropy(lg, val_labels[i]);
    });
    double val_loss = 0;
    for (double v : vlosses) val_loss += v;
    val_loss /= static_cast<double>(vlosses.size());
    result.val_losses.push_back(val_loss);

    if (val_loss < best_val) {
      best_val = val_loss;
      result.model = model;
      result.best_epoch = epoch;
      epochs_since_best = 0;
    } else {
      epochs_since_best += 1;
      if (epochs_since_best >= config.patience) break;
    }
  }
  return result;
}

EvalMetrics metrics_from_confusion(
    const std::array<std::array<std::int64_t, kClasses>, kClasses>& confusion) {
  std::int64_t total = 0, diag = 0;
  std::array<std::int64_t, kClasses> row_sum{}, col_sum{};
  for (int t = 0; t < kClasses; ++t) {
    for (int p = 0; p < kClasses; ++p) {
      const std::int64_t v = confusion[t][p];
      total += v;
      row_sum[t] += v;
      col_sum[p] += v;
      if (t == p) diag += v;
    }
  }
  EvalMetrics m;
  m.confusion = confusion;
  if (total == 0) return m;
  m.accuracy = static_cast<double>(diag) / static_cast<double>(total);
  double precision = 0, recall = 0;
  for (int c = 0; c < kClasses; ++c) {
    const double support = static_cast<double>(row_sum[c]) / static_cast<double>(total);
    // Classes never predicted contribute precision 0.
    const double prec_c =
        col_sum[c] > 0 ? static_cast<double>(confusion[c][c]) / static_cast<double>(col_sum[c]) : 0.0;
    const double rec_c =
        row_sum[c] > 0 ? static_cast<double>(confusion[c][c]) / static_cast<double>(row_sum[c]) : 0.0;
    precision += support * prec_c;
    recall += support * rec_c;
  }
  m.precision_weighted = precision;
  m.recall_weighted = recall;
  return m;
}

EvalMetrics evaluate(const Model& model, const Dataset& dataset, int threads) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  std::vector<int> preds(dataset.size());
  parallel_for(dataset.size(), threads, [&](std::size_t i) {
    Activations<float> act;
    forward_sample(model, dataset[i].image, act);
    int best = 0;
    for (int o = 1; o < kClasses; ++o) {
      if (act.logits[o] > act.logits[best]) best = o;
    }
    preds[i] = best;
  });
  std::array<std::array<std::int64_t, kClasses>, kClasses> confusion{};
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int label = dataset[i].label;
    if (label < 0 || label >= kClasses) throw std::invalid_argument("label out of range");
    confusion[label][preds[i]] += 1;
  }
  return metrics_from_confusion(confusion);
}

namespace {

constexpr char kCheckpointMagic[4] = {'I', 'L', 'G', 'M'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& buf, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(buf, bits);
}

void put_tensor(std::string& buf, const char* name, const std::vector<float>& data,
                const std::vector<std::uint32_t>& dims) {
  const std::size_t name_len = std::strlen(name);
  buf.push_back(static_cast<char>(name_len));
  buf.append(name, name_len);
  put_u32(buf, static_cast<std::uint32_t>(dims.size()));
  std::size_t n = 1;
  for (std::uint32_t d : dims) {
    put_u32(buf, d);
    n *= d;
  }
  if (n != data.size()) throw std::runtime_error("tensor shape mismatch in checkpoint");
  for (float f : data) put_f32(buf, f);
}

struct CheckpointReader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw std::runtime_error("truncated checkpoint");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(buf[pos++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  float f32() {
    const std::uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

void save_checkpoint(const Model& model, const std::string& path) {
  std::string buf;
  buf.append(kCheckpointMagic, 4);
  put_u32(buf, kCheckpointVersion);
  buf.push_back(model.arch == ModelArch::TinyCnn ? 0 : 1);
  put_u32(buf, static_cast<std::uint32_t>(model.input_size));

  const std::uint32_t nin = static_cast<std::uint32_t>(model.fc_inputs());
  std::vector<std::pair<const char*, std::pair<const std::vector<float>*, std::vector<std::uint32_t>>>> tensors;
  if (model.arch == ModelArch::TinyCnn) {
    tensors.push_back({"conv1_w", {&model.conv1_w, {8, 3, 3, 3}}});
    tensors.push_back({"conv1_b", {&model.conv1_b, {8}}});
    tensors.push_back({"conv2_w", {&model.conv2_w, {16, 8, 3, 3}}});
    tensors.push_back({"conv2_b", {&model.conv2_b, {16}}});
  }
  tensors.push_back({"fc_w", {&model.fc_w, {10, nin}}});
  tensors.push_back({"fc_b", {&model.fc_b, {10}}});
  const std::vector<float> nm(model.norm.mean.begin(), model.norm.mean.end());
  const std::vector<float> ns(model.norm.stddev.begin(), model.norm.stddev.end());

  put_u32(buf, static_cast<std::uint32_t>(tensors.size() + 2));
  for (const auto& [name, td] : tensors) put_tensor(buf, name, *td.first, td.second);
  put_tensor(buf, "norm_mean", nm, {3});
  put_tensor(buf, "norm_std", ns, {3});

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  CheckpointReader r{buf};
  r.need(4);
  if (std::memcmp(buf.data(), kCheckpointMagic, 4) != 0) {
    throw std::runtime_error("bad checkpoint magic in " + path);
  }
  r.pos = 4;
  if (r.u32() != kCheckpointVersion) throw std::runtime_error("unsupported checkpoint version");
  const std::uint8_t arch = r.u8();
  Model model;
  model.arch = arch == 0 ? ModelArch::TinyCnn : ModelArch::LogReg;
  model.input_size = static_cast<int>(r.u32());
  const std::uint32_t n_tensors = r.u32();
  for (std::uint32_t t = 0; t < n_tensors; ++t) {
    const std::uint8_t name_len = r.u8();
    const std::string name = r.str(name_len);
    const std::uint32_t ndim = r.u32();
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) n *= r.u32();
    std::vector<float> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = r.f32();
    if (name == "conv1_w") model.conv1_w = std::move(data);
    else if (name == "conv1_b") model.conv1_b = std::move(data);
    else if (name == "conv2_w") model.conv2_w = std::move(data);
    else if (name == "conv2_b") model.conv2_b = std::move(data);
    else if (name == "fc_w") model.fc_w = std::move(data);
    else if (name == "fc_b") model.fc_b = std::move(data);
    else if (name == "norm_mean") {
      for (int c = 0; c < 3; ++c) model.norm.mean[c] = data.at(c);
    } else if (name == "norm_std") {
      for (int c = 0; c < 3; ++c) model.norm.stddev[c] = data.at(c);
    } else {
      throw std::runtime_error("unknown tensor in checkpoint: " + name);
    }
  }
  return model;
}

Image resize_image(const Image& image, int height, int width) {
  if (height < 1 || width < 1) throw std::invalid_argument("bad resize target");
  if (image.height == height && image.width == width) return image;
  Image out(height, width);
  const double sy = static_cast<double>(image.height) / height;
  const double sx = static_cast<double>(image.width) / width;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(image.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(image.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double top = image.at(y0, x0, c) * (1 - wx) + image.at(y0, x1, c) * wx;
        const double bot = image.at(y1, x0, c) * (1 - wx) + image.at(y1, x1, c) * wx;
        out.at(y, x, c) = static_cast<float>(top * (1 - wy) + bot * wy);
      }
    }
  }
  return out;
}

// Explicit instantiations: float for training, double for gradient checks.
template struct ModelT<float>;
template struct ModelT<double>;
template ModelT<float> init_model<float>(ModelArch, int, std::uint64_t);
template ModelT<double> init_model<double>(ModelArch, int, std::uint64_t);
template ModelT<double> cast_model<double, float>(const ModelT<float>&);
template ModelT<float> cast_model<float, double>(const ModelT<double>&);
template std::vector<float> forward<float>(const ModelT<float>&, const std::vector<Image>&);
template std::vector<double> forward<double>(const ModelT<double>&, const std::vector<Image>&);
template std::pair<double, ModelT<float>> loss_and_grad<float>(const ModelT<float>&,
                                                               const std::vector<Image>&,
                                                               const std::vector<int>&, int);
template std::pair<double, ModelT<double>> loss_and_grad<double>(const ModelT<double>&,
                                                                 const std::vector<Image>&,
                                                                 const std::vector<int>&, int);

}  // namespace ilg
