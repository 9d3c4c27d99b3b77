from mvsgrade.imaging.image import RgbImage, GrayImage, ImageDecodeError, \
    load_image, save_image, save_mask_pgm, to_grayscale
from mvsgrade.imaging.edges import EdgeParams, ImageTooSmallError, \
    detect_edges
from mvsgrade.imaging.foreground import ForegroundMask, \
    ExtractionFailedError, extract_foreground, segment
