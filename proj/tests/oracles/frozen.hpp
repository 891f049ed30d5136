#pragma once

// Oracle outputs, frozen. test_oracles regenerates them.
namespace frozen {

// Ai'(x)^2 - x Ai(x)^2 at x = -2, -1, 0, 1, 2
inline constexpr double kAiryGrid[5] = {-2, -1, 0, 1, 2};
inline constexpr double kAiryDiagonal[5] = {4.856724935310876e-01, 2.869286968370168e-01,
                                            6.698748377966399e-02, 7.023870159538398e-03,
                                            3.791991476696116e-04};

// F_2 from the Hastings-McLeod integration; good to about 1e-8
inline constexpr double kTwGrid[7] = {-4, -3, -2, -1, 0, 1, 2};
inline constexpr double kTw2[7] = {0.003544557815, 0.080319562362, 0.413224149785, 0.807214244445,
                                   0.969372828744, 0.997505438181, 0.999887553700};

// E[# points above A], two-path Dyson Brownian motion at t = 1
inline constexpr double kCountGrid[3] = {-2, 0, 2};
inline constexpr double kDbm2Count[3] = {1.846517803077, 1.0, 0.153482196923};

// P(B(1) <= 0, B(2) <= 0)
inline constexpr double kBrownianOrthant = 0.375;

}  // namespace frozen
