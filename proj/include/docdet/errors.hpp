#pragma once

#include <stdexcept>
#include <string>

namespace docdet {

/// Base class for all docdet failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or unsupported image stream.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// Input raster smaller than an operator's support.
class ImageTooSmall : public Error {
public:
    using Error::Error;
};

/// Line intersection requested for (near-)parallel lines.
class ParallelLines : public Error {
public:
    using Error::Error;
};

/// Quadrilateral unusable as a homography basis (collinear vertices).
class DegenerateQuad : public Error {
public:
    using Error::Error;
};

/// Projective mapping sent a point to the plane at infinity.
class PointAtInfinity : public Error {
public:
    using Error::Error;
};

/// Border shorter than the minimal rasterizable length.
class DegenerateBorder : public Error {
public:
    using Error::Error;
};

/// Inner or outer contrast region too small to histogram.
class EmptyRegion : public Error {
public:
    using Error::Error;
};

/// Fewer than two line candidates in one of the orientations.
class NotEnoughLines : public Error {
public:
    using Error::Error;
};

/// Dataset frame without a matching annotation file.
class MissingAnnotation : public Error {
public:
    using Error::Error;
};

/// Annotation file present but unparsable or inconsistent.
class MalformedAnnotation : public Error {
public:
    using Error::Error;
};

}  // namespace docdet
