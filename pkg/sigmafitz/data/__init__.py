from .build import build_operator, build_sigma, build_pair, load_operator, load_points, parse_sigma, save_document
