"""Image primitives: sub-pixel sampling, warping, pyramids, and affine maps.

Conventions used throughout the package:
  * images are float64 arrays of shape (H, W, C) with values in [0, 1],
    C in {1, 3}; scalar maps are (H, W)
  * a pixel coordinate is (x, y) with x = column index, y = row index
  * an affine map is a (2, 3) float64 array [[a, b, c], [d, e, f]] acting
    on homogeneous coordinates (x, y, 1)
  * an affine field is (H, W, 2, 3), one map per pixel
  * all sampling clamps coordinates to the image border
"""

import numpy as np
from PIL import Image as _PILImage
from scipy.ndimage import convolve1d

from .errors import ConfigError

# 5-tap Gaussian (sigma = 1) used for pyramid pre-smoothing
_PYR_KERNEL = np.exp(-0.5 * np.arange(-2.0, 3.0) ** 2)
_PYR_KERNEL /= _PYR_KERNEL.sum()


def validate_image(img):
    """Check shape/range conventions, returning the array unchanged."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] not in (1, 3):
        raise ValueError(f"expected (H, W, C) image with C in {{1, 3}}, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"empty image of shape {img.shape}")
    if not np.isfinite(img).all():
        raise ValueError("image contains non-finite values")
    return img


def to_gray(img):
    """Single-channel guide signal: mean over channels, shape (H, W)."""
    img = validate_image(img)
    return img.mean(axis=2)


def identity_map():
    return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


def identity_field(height, width):
    field = np.zeros((height, width, 2, 3))
    field[..., 0, 0] = 1.0
    field[..., 1, 1] = 1.0
    return field


def affine_is_valid(t, det_min=0.25, det_max=4.0):
    """True iff all entries are finite and the linear part's determinant
    lies in [det_min, det_max] (reflections excluded)."""
    if not np.isfinite(t).all():
        return False
    det = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
    return det_min <= det <= det_max


def apply_affine(t, p):
    """Map pixel coordinate p = (x, y) through t, returning a real 2-vector."""
    x, y = p
    return np.array([t[0, 0] * x + t[0, 1] * y + t[0, 2],
                     t[1, 0] * x + t[1, 1] * y + t[1, 2]])


def transform_points(t, xs, ys):
    """Vectorized apply_affine over coordinate arrays; returns (qx, qy)."""
    qx = t[0, 0] * xs + t[0, 1] * ys + t[0, 2]
    qy = t[1, 0] * xs + t[1, 1] * ys + t[1, 2]
    return qx, qy


def field_endpoints(field):
    """Per-pixel mapped locations field[i] @ (x, y, 1); returns (qx, qy) maps."""
    h, w = field.shape[:2]
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    qx = field[..., 0, 0] * xs + field[..., 0, 1] * ys + field[..., 0, 2]
    qy = field[..., 1, 0] * xs + field[..., 1, 1] * ys + field[..., 1, 2]
    return qx, qy


def sample_bilinear(img, qx, qy):
    """Bilinear interpolation of img at real coordinates, clamped to the
    border.  img is (H, W) or (H, W, C); output matches qx's shape with a
    trailing channel axis when img has one."""
    img = np.asarray(img)
    h, w = img.shape[:2]
    qx = np.clip(qx, 0.0, w - 1.0)
    qy = np.clip(qy, 0.0, h - 1.0)
    x0 = np.minimum(qx.astype(np.int64), w - 2) if w > 1 else np.zeros_like(qx, dtype=np.int64)
    y0 = np.minimum(qy.astype(np.int64), h - 2) if h > 1 else np.zeros_like(qy, dtype=np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = qx - x0
    fy = qy - y0
    if img.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
    v00 = img[y0, x0]
    v10 = img[y0, x1]
    v01 = img[y1, x0]
    v11 = img[y1, x1]
    return (v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy)
            + v01 * (1 - fx) * fy + v11 * fx * fy)


def bilinear_sample(img, q):
    """Point version of sample_bilinear: returns the channel vector at q."""
    img = np.asarray(img)
    out = sample_bilinear(img, np.asarray(float(q[0])), np.asarray(float(q[1])))
    return np.atleast_1d(out)


def warp_image(img, field):
    """Pull img through the field: output pixel i samples img at field[i] @ i.

    Used to reconstruct the source view from the target image for
    qualitative inspection.
    """
    img = validate_image(img)
    if field.shape[:2] != img.shape[:2]:
        raise ValueError(f"field shape {field.shape[:2]} does not match image {img.shape[:2]}")
    qx, qy = field_endpoints(field)
    return sample_bilinear(img, qx, qy)


def _smooth(img, sigma_kernel=_PYR_KERNEL):
    out = convolve1d(img, sigma_kernel, axis=0, mode="nearest")
    return convolve1d(out, sigma_kernel, axis=1, mode="nearest")


def resize_bilinear(img, new_h, new_w):
    """Origin-aligned bilinear resize (x_old = x_new * W/newW)."""
    h, w = img.shape[:2]
    xs = np.arange(new_w) * (w / new_w)
    ys = np.arange(new_h) * (h / new_h)
    qx, qy = np.meshgrid(xs, ys)
    return sample_bilinear(img, qx, qy)


def build_pyramid(img, levels, factor=0.5, min_dim=None):
    """Gaussian pyramid ordered coarse to fine; the last level is the input.

    Each coarser level is the Gaussian-smoothed previous level resampled by
    `factor` (dimensions rounded).  Raises ConfigError when a level would
    fall below min_dim in either dimension.
    """
    img = validate_image(img)
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if not 0.0 < factor < 1.0:
        raise ValueError("factor must lie in (0, 1)")
    out = [np.array(img, dtype=np.float64)]
    for _ in range(levels - 1):
        cur = out[-1]
        h, w = cur.shape[:2]
        new_h = max(1, int(round(h * factor)))
        new_w = max(1, int(round(w * factor)))
        out.append(resize_bilinear(_smooth(cur), new_h, new_w))
    if min_dim is not None:
        for lv in out:
            if min(lv.shape[:2]) < min_dim:
                raise ConfigError(
                    f"pyramid level of shape {lv.shape[:2]} is smaller than "
                    f"the required minimum dimension {min_dim}")
    out.reverse()
    return out


def upsample_field(field, new_w, new_h):
    """Nearest-neighbor field upsampling to (new_h, new_w).

    The 2x2 linear part is copied unchanged; the translation column is
    scaled by the per-axis size ratio so mapped endpoints rescale with the
    grid.
    """
    h, w = field.shape[:2]
    if new_w < w or new_h < h:
        raise ValueError("upsample_field only enlarges fields")
    sx = new_w / w
    sy = new_h / h
    src_x = np.minimum((np.arange(new_w) * (w / new_w)).astype(np.int64), w - 1)
    src_y = np.minimum((np.arange(new_h) * (h / new_h)).astype(np.int64), h - 1)
    out = field[src_y[:, None], src_x[None, :]].copy()
    out[..., 0, 2] *= sx
    out[..., 1, 2] *= sy
    return out


def load_png(path):
    """Decode an 8-bit PNG (grayscale or RGB) to a float image in [0, 1]."""
    with _PILImage.open(path) as im:
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB" if im.mode not in ("1", "I", "I;16") else "L")
        arr = np.asarray(im, dtype=np.float64) / 255.0
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr


def save_png(img, path):
    """Write a float image in [0, 1] as an 8-bit PNG."""
    img = validate_image(img)
    arr = np.clip(np.round(img * 255.0), 0, 255).astype(np.uint8)
    if arr.shape[2] == 1:
        _PILImage.fromarray(arr[:, :, 0], mode="L").save(path)
    else:
        _PILImage.fromarray(arr, mode="RGB").save(path)
