from bgdenoise.data.image import Image, load_pgm, save_pgm, read_pgm, write_pgm
from bgdenoise.data.noise import add_gaussian_noise
