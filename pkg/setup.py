from setuptools import setup, find_packages

setup(name='mvsgrade',
      version='0.1',
      scripts=['bin/mvsgrade'],
      packages=find_packages(include=['mvsgrade', 'mvsgrade.*']),
      package_dir={'mvsgrade': 'mvsgrade'},
      description='Machine-vision produce grading: spectral color patterns, '
                  'backpropagation networks and artificial-chemistry '
                  'structure search',
      python_requires='>=3.8',
      install_requires=['numpy', 'scipy', 'Pillow', 'PyYAML',
                        'pandas>=1.5', 'scikit-learn'],
      extras_require={'tests': ['pytest']})
