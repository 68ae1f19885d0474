#include "melscreen/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace melscreen {

RgbImage load_rgb(const std::filesystem::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw std::runtime_error("cannot decode image: " + path.string());
  if (m.depth() != CV_8U) {
    throw std::runtime_error("unsupported bit depth (want 8-bit): " + path.string());
  }
  if (m.channels() != 1 && m.channels() != 3 && m.channels() != 4) {
    throw std::runtime_error("unsupported channel count in " + path.string());
  }
  RgbImage out(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      std::uint8_t r, g, b;
      if (m.channels() == 1) {
        r = g = b = m.at<std::uint8_t>(y, x);
      } else if (m.channels() == 4) {
        const cv::Vec4b px = m.at<cv::Vec4b>(y, x);  // BGRA
        b = px[0];
        g = px[1];
        r = px[2];
      } else {
        const cv::Vec3b px = m.at<cv::Vec3b>(y, x);  // BGR
        b = px[0];
        g = px[1];
        r = px[2];
      }
      const std::size_t i = (static_cast<std::size_t>(y) * m.cols + x) * 3;
      out.data[i] = r;
      out.data[i + 1] = g;
      out.data[i + 2] = b;
    }
  }
  return out;
}

GrayImage load_gray(const std::filesystem::path& path) {
  return to_grayscale(load_rgb(path));
}

void save_gray_png(const std::filesystem::path& path, const GrayImage& img) {
  cv::Mat m(img.height, img.width, CV_8UC1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double v = std::clamp(static_cast<double>(img.at(x, y)), 0.0, 1.0);
      m.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  if (!cv::imwrite(path.string(), m)) {
    throw std::runtime_error("cannot write PNG: " + path.string());
  }
}

void save_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  cv::Mat m(mask.height, mask.width, CV_8UC1);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      m.at<std::uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
    }
  }
  if (!cv::imwrite(path.string(), m)) {
    throw std::runtime_error("cannot write PNG: " + path.string());
  }
}

BinaryMask load_mask_png(const std::filesystem::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (m.empty()) throw std::runtime_error("cannot decode mask: " + path.string());
  BinaryMask out(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      out.at(x, y) = m.at<std::uint8_t>(y, x) >= 128 ? 1 : 0;
    }
  }
  return out;
}

}  // namespace melscreen
