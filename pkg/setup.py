from setuptools import setup, find_packages

setup(
    name='gkwcert',
    version='0.1.0',
    packages=find_packages(include=['gkwcert', 'gkwcert.*']),
    description = "Validated eigenvalue, projector and spectral gap certificates for the Gauss-Kuzmin-Wirsing operator",
    install_requires=[
        'python-flint',
        'mpmath',
        'numpy',
        'typer',
        'pydantic[dotenv]<2',
        'SQLAlchemy<2',
    ],
    entry_points={
        'console_scripts': ['gkwcert=gkwcert.cli:app'],
    },
    python_requires = '>=3.9'
)
