#include "stmforge/genmodel/tiny_denoiser.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stmforge/common/rng.hpp"

namespace stmforge::genmodel {

namespace {

void init_normal(Param& p, double sd, Rng& rng) {
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = rng.normal(0.0, sd);
}

Tensor split_right(const Tensor& t, int first) {
    Tensor out(t.channels - first, t.height, t.width);
    out.data = t.data.rightCols(t.channels - first);
    return out;
}

Tensor split_left(const Tensor& t, int count) {
    Tensor out(count, t.height, t.width);
    out.data = t.data.leftCols(count);
    return out;
}

}  // namespace

TinyDenoiser::~TinyDenoiser() = default;

TinyDenoiser::TinyDenoiser(Config cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
    if (cfg_.channels.empty()) throw std::invalid_argument("denoiser needs at least one level");
    for (int c : cfg_.channels)
        if (c <= 0) throw std::invalid_argument("channel widths must be positive");
    if (cfg_.time_dim <= 0 || cfg_.time_dim % 2) throw std::invalid_argument("time embedding dimension must be even and positive");

    const int levels = static_cast<int>(cfg_.channels.size());
    int cin = 2;
    for (int l = 0; l < levels; ++l) {
        const int c = cfg_.channels[static_cast<std::size_t>(l)];
        const std::string p = "enc" + std::to_string(l);
        enc_.push_back({Conv2d(p + ".conv_a", cin, c, 3), Conv2d(p + ".conv_b", c, c, 3), Dense(p + ".time", cfg_.time_dim, c)});
        cin = c;
    }
    for (int l = 0; l + 1 < levels; ++l) {
        const int c = cfg_.channels[static_cast<std::size_t>(l)];
        const int up = cfg_.channels[static_cast<std::size_t>(l + 1)];
        dec_.emplace_back("dec" + std::to_string(l) + ".conv", up + c, c, 3);
    }
    out_ = Conv2d("out.conv", cfg_.channels.front(), 1, 3);

    Rng rng(seed);
    for (Param* p : parameters()) {
        if (p->shape.size() == 1) continue;  // biases start at zero
        const bool dense = p->shape.size() == 2;
        const auto fan_in = static_cast<double>(dense ? p->value.cols() : p->value.rows());
        double sd = dense ? std::sqrt(1.0 / fan_in) : std::sqrt(2.0 / fan_in);
        if (p == &out_.weight) sd *= 0.1;
        init_normal(*p, sd, rng);
    }
}

std::vector<Param*> TinyDenoiser::parameters() {
    std::vector<Param*> ps;
    for (auto& l : enc_)
        for (Param* p : {&l.conv_a.weight, &l.conv_a.bias, &l.conv_b.weight, &l.conv_b.bias, &l.time.weight, &l.time.bias}) ps.push_back(p);
    for (auto& d : dec_) {
        ps.push_back(&d.weight);
        ps.push_back(&d.bias);
    }
    ps.push_back(&out_.weight);
    ps.push_back(&out_.bias);
    return ps;
}

std::vector<const Param*> TinyDenoiser::parameters() const {
    auto mut = const_cast<TinyDenoiser*>(this)->parameters();
    return {mut.begin(), mut.end()};
}

std::size_t TinyDenoiser::parameter_count() const {
    std::size_t n = 0;
    for (const Param* p : parameters()) n += static_cast<std::size_t>(p->size());
    return n;
}

void TinyDenoiser::zero_grad() {
    for (Param* p : parameters()) p->grad.setZero();
}

Tensor TinyDenoiser::make_input(const Image& x, const Image& condition) {
    imagecore::require_same_shape(x, condition, "denoiser input");
    Tensor t(2, x.height(), x.width());
    t.data.col(0) = Eigen::Map<const Eigen::VectorXd>(x.pixels().data(), t.pixels());
    t.data.col(1) = Eigen::Map<const Eigen::VectorXd>(condition.pixels().data(), t.pixels());
    return t;
}

Tensor TinyDenoiser::forward(const Tensor& input, double time, Cache* cache) const {
    if (input.channels != 2) throw std::invalid_argument("denoiser input needs 2 channels");
    const int m = size_multiple();
    if (input.height % m || input.width % m || input.height == 0 || input.width == 0)
        throw std::invalid_argument("image size must be a positive multiple of " + std::to_string(m));
    const int levels = this->levels();
    const Eigen::VectorXd temb = time_embedding(time, cfg_.time_dim);
    if (cache) {
        cache->time = time;
        cache->temb = temb;
        cache->enc.assign(static_cast<std::size_t>(levels), {});
        cache->dec.assign(dec_.size(), {});
        cache->height = input.height;
        cache->width = input.width;
    }

    std::vector<Tensor> skips;
    Tensor cur = input;
    for (int l = 0; l < levels; ++l) {
        const auto& lv = enc_[static_cast<std::size_t>(l)];
        if (l > 0) cur = avg_pool2(cur);
        Cache::Enc* ce = cache ? &cache->enc[static_cast<std::size_t>(l)] : nullptr;
        Tensor pre_a = lv.conv_a.forward(cur, ce ? &ce->cols_a : nullptr);
        pre_a.data.rowwise() += lv.time.forward(temb).transpose();
        Tensor pre_b = lv.conv_b.forward(silu(pre_a), ce ? &ce->cols_b : nullptr);
        if (ce) {
            ce->in = cur;
            ce->pre_a = pre_a;
        }
        cur = silu(pre_b);
        if (ce) ce->pre_b = std::move(pre_b);
        skips.push_back(cur);
    }
    for (int l = levels - 2; l >= 0; --l) {
        Cache::Dec* cd = cache ? &cache->dec[static_cast<std::size_t>(l)] : nullptr;
        Tensor pre = dec_[static_cast<std::size_t>(l)].forward(concat_channels(upsample2(cur), skips[static_cast<std::size_t>(l)]),
                                                                cd ? &cd->cols : nullptr);
        cur = silu(pre);
        if (cd) cd->pre = std::move(pre);
    }
    return out_.forward(cur, cache ? &cache->out_cols : nullptr);
}

void TinyDenoiser::backward(const Cache& cache, const Tensor& dout) {
    const int levels = this->levels();
    std::vector<int> hs(static_cast<std::size_t>(levels)), ws(static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l) {
        hs[static_cast<std::size_t>(l)] = cache.height >> l;
        ws[static_cast<std::size_t>(l)] = cache.width >> l;
    }
    std::vector<Tensor> d_enc;
    for (int l = 0; l < levels; ++l) d_enc.emplace_back(cfg_.channels[static_cast<std::size_t>(l)], hs[static_cast<std::size_t>(l)], ws[static_cast<std::size_t>(l)]);

    Tensor dd = out_.backward(dout, cache.out_cols, cache.height, cache.width);
    for (int l = 0; l + 1 < levels; ++l) {
        const auto li = static_cast<std::size_t>(l);
        const Tensor dpre = silu_backward(cache.dec[li].pre, dd);
        const Tensor dcat = dec_[li].backward(dpre, cache.dec[li].cols, hs[li], ws[li]);
        const int up = cfg_.channels[li + 1];
        d_enc[li].data += split_right(dcat, up).data;
        dd = upsample2_backward(split_left(dcat, up));
    }
    d_enc.back().data += dd.data;

    for (int l = levels - 1; l >= 0; --l) {
        const auto li = static_cast<std::size_t>(l);
        auto& lv = enc_[li];
        const auto& ce = cache.enc[li];
        const Tensor dpre_b = silu_backward(ce.pre_b, d_enc[li]);
        const Tensor da = lv.conv_b.backward(dpre_b, ce.cols_b, hs[li], ws[li]);
        const Tensor dpre_a = silu_backward(ce.pre_a, da);
        lv.time.backward(cache.temb, dpre_a.data.colwise().sum().transpose());
        const Tensor din = lv.conv_a.backward(dpre_a, ce.cols_a, hs[li], ws[li]);
        if (l > 0) d_enc[li - 1].data += avg_pool2_backward(din).data;
    }
}

Image TinyDenoiser::predict(const Image& x, double time, const Image& condition) const {
    const Tensor y = forward(make_input(x, condition), time, nullptr);
    std::vector<double> px(y.data.data(), y.data.data() + y.data.size());
    return Image(x.height(), x.width(), std::move(px));
}

}  // namespace stmforge::genmodel
