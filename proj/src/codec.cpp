#include "docdet/codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <jpeglib.h>
#include <png.h>

#include "docdet/errors.hpp"

namespace docdet {

namespace {

bool is_png(std::span<const uint8_t> b) {
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    return b.size() >= 8 && std::memcmp(b.data(), sig, 8) == 0;
}

bool is_jpeg(std::span<const uint8_t> b) {
    return b.size() >= 2 && b[0] == 0xff && b[1] == 0xd8;
}

struct PngReadState {
    const uint8_t* data;
    size_t size;
    size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t n) {
    auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (st->pos + n > st->size) png_error(png, "truncated stream");
    std::memcpy(out, st->data + st->pos, n);
    st->pos += n;
}

void png_mem_write(png_structp png, png_bytep data, png_size_t n) {
    auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + n);
}

void png_mem_flush(png_structp) {}

RgbImage decode_png(std::span<const uint8_t> bytes) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DecodeError("png: allocation failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("png: allocation failure");
    }

    RgbImage img;
    std::vector<png_bytep> rows;
    PngReadState st{bytes.data(), bytes.size(), 0};

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("png: malformed stream");
    }

    png_set_read_fn(png, &st, png_mem_read);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth > 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("png: only 8-bit channels are supported");
    }

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels.resize(3 * static_cast<size_t>(w) * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = img.pixels.data() + 3 * static_cast<size_t>(w) * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

struct JpegErrorMgr {
    jpeg_error_mgr base;
    jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    longjmp(mgr->jump, 1);
}

RgbImage decode_jpeg(std::span<const uint8_t> bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError("jpeg: malformed stream");
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    RgbImage img;
    img.width = static_cast<int>(cinfo.output_width);
    img.height = static_cast<int>(cinfo.output_height);
    img.pixels.resize(3 * static_cast<size_t>(img.width) * img.height);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = img.pixels.data() + 3 * static_cast<size_t>(img.width) * cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    // libjpeg pads truncated streams with dummy data and only warns.
    const long warnings = cinfo.err->num_warnings;
    jpeg_destroy_decompress(&cinfo);
    if (warnings > 0) throw DecodeError("jpeg: corrupt or truncated stream");
    return img;
}

uint32_t be32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | p[3];
}

}  // namespace

RgbImage decode_image(std::span<const uint8_t> bytes) {
    if (is_png(bytes)) return decode_png(bytes);
    if (is_jpeg(bytes)) return decode_jpeg(bytes);
    throw DecodeError("unrecognized image signature (PNG and JPEG are supported)");
}

ImageDims peek_image_size(std::span<const uint8_t> bytes) {
    if (is_png(bytes)) {
        // IHDR is mandatory and first: signature(8) + len(4) + "IHDR"(4) + w(4) + h(4).
        if (bytes.size() < 24 || std::memcmp(bytes.data() + 12, "IHDR", 4) != 0)
            throw DecodeError("png: missing IHDR");
        return {static_cast<int>(be32(bytes.data() + 16)), static_cast<int>(be32(bytes.data() + 20))};
    }
    if (is_jpeg(bytes)) {
        // Walk marker segments until a start-of-frame carrying dimensions.
        size_t i = 2;
        while (i + 3 < bytes.size()) {
            if (bytes[i] != 0xff) {
                ++i;
                continue;
            }
            const uint8_t marker = bytes[i + 1];
            if (marker == 0xff) {
                ++i;
                continue;
            }
            if (marker == 0xd8 || (marker >= 0xd0 && marker <= 0xd7)) {
                i += 2;
                continue;
            }
            if (i + 4 > bytes.size()) break;
            const size_t seg_len = (size_t(bytes[i + 2]) << 8) | bytes[i + 3];
            const bool sof = (marker >= 0xc0 && marker <= 0xcf) && marker != 0xc4 &&
                             marker != 0xc8 && marker != 0xcc;
            if (sof) {
                if (i + 9 >= bytes.size()) break;
                const int h = (bytes[i + 5] << 8) | bytes[i + 6];
                const int w = (bytes[i + 7] << 8) | bytes[i + 8];
                return {w, h};
            }
            i += 2 + seg_len;
        }
        throw DecodeError("jpeg: no frame header found");
    }
    throw DecodeError("unrecognized image signature");
}

namespace {

std::vector<uint8_t> encode_png_impl(const uint8_t* data, int width, int height, int channels) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DecodeError("png: allocation failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DecodeError("png: allocation failure");
    }
    std::vector<uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DecodeError("png: write failure");
    }
    png_set_write_fn(png, &out, png_mem_write, png_mem_flush);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(static_cast<size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[static_cast<size_t>(y)] =
            const_cast<png_bytep>(data + static_cast<size_t>(channels) * width * y);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace

std::vector<uint8_t> encode_png(const RgbImage& img) {
    return encode_png_impl(img.pixels.data(), img.width, img.height, 3);
}

std::vector<uint8_t> encode_png(const GrayImage& img) {
    return encode_png_impl(img.pixels.data(), img.width, img.height, 1);
}

std::vector<uint8_t> encode_jpeg(const RgbImage& img, int quality) {
    jpeg_compress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    unsigned char* buf = nullptr;
    unsigned long buf_size = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        if (buf) free(buf);
        throw DecodeError("jpeg: encode failure");
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buf, &buf_size);
    cinfo.image_width = static_cast<JDIMENSION>(img.width);
    cinfo.image_height = static_cast<JDIMENSION>(img.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(
            img.pixels.data() + 3 * static_cast<size_t>(img.width) * cinfo.next_scanline);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    std::vector<uint8_t> out(buf, buf + buf_size);
    free(buf);
    return out;
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DecodeError("cannot read " + path);
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

RgbImage load_image_file(const std::string& path) {
    const std::vector<uint8_t> bytes = read_file_bytes(path);
    return decode_image(bytes);
}

void save_bytes(const std::string& path, std::span<const uint8_t> bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error("short write to " + path);
}

}  // namespace docdet
