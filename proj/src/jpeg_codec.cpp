#include "carsr/jpeg_codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
// jpeglib.h needs size_t and FILE declared first.
#include <jpeglib.h>

#include "carsr/errors.hpp"

namespace carsr {
namespace {

struct ErrorManager {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void on_error(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

void silence(j_common_ptr, int) {}

// The setjmp frames below hold only trivially destructible locals.
bool encode_raw(const Rgb8& rgb, int quality, unsigned char** out, unsigned long* out_size, char* message) {
    jpeg_compress_struct cinfo;
    ErrorManager err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = on_error;
    err.pub.emit_message = silence;
    if (setjmp(err.jump)) {
        std::snprintf(message, JMSG_LENGTH_MAX, "%s", err.message);
        jpeg_destroy_compress(&cinfo);
        return false;
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, out, out_size);
    cinfo.image_width = static_cast<JDIMENSION>(rgb.width);
    cinfo.image_height = static_cast<JDIMENSION>(rgb.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    // 4:2:0: luma sampled 2x2 relative to both chroma planes.
    cinfo.comp_info[0].h_samp_factor = 2;
    cinfo.comp_info[0].v_samp_factor = 2;
    cinfo.comp_info[1].h_samp_factor = 1;
    cinfo.comp_info[1].v_samp_factor = 1;
    cinfo.comp_info[2].h_samp_factor = 1;
    cinfo.comp_info[2].v_samp_factor = 1;
    cinfo.dct_method = JDCT_ISLOW;
    cinfo.optimize_coding = FALSE;
    jpeg_start_compress(&cinfo, TRUE);
    const int stride = rgb.width * 3;
    while (cinfo.next_scanline < cinfo.image_height) {
        auto* row = const_cast<JSAMPLE*>(rgb.pixels.data() + static_cast<std::size_t>(cinfo.next_scanline) * stride);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    return true;
}

bool decode_raw(const unsigned char* data, unsigned long size, Rgb8* out, char* message) {
    jpeg_decompress_struct cinfo;
    ErrorManager err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = on_error;
    err.pub.emit_message = silence;
    if (setjmp(err.jump)) {
        std::snprintf(message, JMSG_LENGTH_MAX, "%s", err.message);
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, data, size);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    cinfo.dct_method = JDCT_ISLOW;
    jpeg_start_decompress(&cinfo);
    out->height = static_cast<int>(cinfo.output_height);
    out->width = static_cast<int>(cinfo.output_width);
    out->pixels.resize(static_cast<std::size_t>(out->height) * out->width * 3);
    const int stride = out->width * 3;
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPLE* row = out->pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

void check_quality(int quality) {
    if (quality < 1 || quality > 100) {
        throw DomainError("JPEG quality factor must be in [1, 100], got " + std::to_string(quality));
    }
}

}  // namespace

std::vector<std::uint8_t> encode_jpeg(const Rgb8& rgb, int quality) {
    check_quality(quality);
    if (rgb.height < 1 || rgb.width < 1 || rgb.pixels.size() != static_cast<std::size_t>(rgb.height) * rgb.width * 3) {
        throw ShapeError("encode_jpeg: malformed RGB buffer");
    }
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    char message[JMSG_LENGTH_MAX] = {};
    const bool ok = encode_raw(rgb, quality, &buffer, &size, message);
    std::vector<std::uint8_t> out;
    if (ok) out.assign(buffer, buffer + size);
    std::free(buffer);
    if (!ok) throw IoError(std::string("JPEG encode failed: ") + message);
    return out;
}

Rgb8 decode_jpeg(std::span<const std::uint8_t> bytes) {
    Rgb8 out;
    char message[JMSG_LENGTH_MAX] = {};
    if (!decode_raw(bytes.data(), static_cast<unsigned long>(bytes.size()), &out, message)) {
        throw InputError(std::string("JPEG decode failed: ") + message);
    }
    return out;
}

std::string jpeg_codec_id() {
#ifdef LIBJPEG_TURBO_VERSION
#define CARSR_STR2(x) #x
#define CARSR_STR(x) CARSR_STR2(x)
    return std::string("libjpeg-turbo ") + CARSR_STR(LIBJPEG_TURBO_VERSION) + " (jpeglib " +
           std::to_string(JPEG_LIB_VERSION) + ", islow, 4:2:0)";
#else
    return "libjpeg " + std::to_string(JPEG_LIB_VERSION) + " (islow, 4:2:0)";
#endif
}

Image jpeg_roundtrip(const Image& img, int quality) {
    check_quality(quality);
    const auto bytes = encode_jpeg(to_rgb8(img), quality);
    return from_rgb8(decode_jpeg(bytes));
}

}  // namespace carsr
